#pragma once

/**
 * @file report.hpp
 * @brief Residual reports: named residuals with tolerances, verdicts and provenance.
 */

#include <algorithm>
#include <string>
#include <vector>

namespace koop {

struct ResidualEntry {
  std::string name;       // which residual, e.g. "semigroup-law"
  std::string witness_f;  // observable label, when the residual has a witness
  std::string witness_g;
  std::string point;      // formatted state point, when meaningful
  double value = 0.0;     // measured quantity
  double residual = 0.0;  // defect against the identity under test
  double tol = 0.0;
  bool pass = true;
};

struct ResidualReport {
  std::string suite;       // producing operation
  std::string provenance;  // flow / operator under test
  std::vector<std::string> assumptions;  // hypotheses assumed, not verified
  std::vector<std::string> warnings;
  std::vector<ResidualEntry> entries;
  bool pass = true;

  ResidualEntry& add(ResidualEntry e) {
    entries.push_back(std::move(e));
    pass = pass && entries.back().pass;
    return entries.back();
  }

  ResidualEntry& add_residual(std::string name, double residual, double tol) {
    ResidualEntry e;
    e.name = std::move(name);
    e.value = residual;
    e.residual = residual;
    e.tol = tol;
    e.pass = residual < tol;
    return add(std::move(e));
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual);
    return m;
  }

  const ResidualEntry* find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

}  // namespace koop
