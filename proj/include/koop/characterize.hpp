#pragma once

/**
 * @file characterize.hpp
 * @brief Residual suites that discriminate Koopman semigroups: unital
 *        algebra/lattice homomorphism checks at the operator level, the
 *        derivation product rule and Kato's equality at the generator level,
 *        and point-map recovery from evaluation functionals.
 */

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "koop/errors.hpp"
#include "koop/geometry.hpp"
#include "koop/koopman.hpp"
#include "koop/observable.hpp"
#include "koop/report.hpp"
#include "koop/semiflow.hpp"

namespace koop {

/**
 * hsign(w)(z): (w/|w|) z away from zero, |z| on the zero branch. The exact
 * case split needs a floating-point band: |w| <= eps selects the |z| branch.
 */
inline Complex hsign(Complex w, Complex z, double eps = 0.0) {
  if (std::abs(w) > eps) return (w / std::abs(w)) * z;
  return Complex{std::abs(z), 0.0};
}

/// The evaluated case split, kept alongside its inputs for reporting.
struct HsignValue {
  Complex w{0.0, 0.0};
  Complex z{0.0, 0.0};
  Complex result{0.0, 0.0};
};

inline HsignValue hsign_value(Complex w, Complex z, double eps = 0.0) {
  return {w, z, hsign(w, z, eps)};
}

enum class OperatorKind { FromFlow, BlackBox };

/// A one-parameter family of operators on observables, to be classified.
struct OperatorUnderTest {
  std::function<Observable(double, const Observable&)> apply;
  std::string label;
  OperatorKind kind = OperatorKind::BlackBox;
};

inline OperatorUnderTest koopman_operator_under_test(const Semiflow& flow) {
  return {[flow](double t, const Observable& f) { return koopman_apply(flow, t, f); },
          "koopman(" + flow.label + ")", OperatorKind::FromFlow};
}

/// Negative control: S f = (f + T(t) f) / 2. Linear and unital, but neither
/// multiplicative nor a lattice homomorphism.
inline OperatorUnderTest averaging_operator(const Semiflow& flow) {
  return {[flow](double t, const Observable& f) {
            return scale(Complex{0.5, 0.0}, add(f, koopman_apply(flow, t, f)));
          },
          "averaging(" + flow.label + ")", OperatorKind::BlackBox};
}

/// Control that is unital and modulus-preserving but only conjugate-linear.
inline OperatorUnderTest conjugation_operator(const Semiflow& flow) {
  return {[flow](double t, const Observable& f) { return conjugate(koopman_apply(flow, t, f)); },
          "conjugation(" + flow.label + ")", OperatorKind::BlackBox};
}

/// Control that scales values: multiplicativity survives only for c in {0,1}.
inline OperatorUnderTest scaled_operator(const Semiflow& flow, Complex c) {
  return {[flow, c](double t, const Observable& f) { return scale(c, koopman_apply(flow, t, f)); },
          "scaled(" + flow.label + ")", OperatorKind::BlackBox};
}

namespace detail {

struct WorstResidual {
  double value = 0.0;
  std::string witness_f, witness_g, point;

  void update(double r, const std::string& f, const std::string& g, const StatePoint& x) {
    if (r >= value) {
      value = r;
      witness_f = f;
      witness_g = g;
      point = format_point(x);
    }
  }
};

inline ResidualEntry entry_from(const std::string& name, const WorstResidual& w, double tol) {
  ResidualEntry e;
  e.name = name;
  e.witness_f = w.witness_f;
  e.witness_g = w.witness_g;
  e.point = w.point;
  e.value = w.value;
  e.residual = w.value;
  e.tol = tol;
  e.pass = w.value < tol;
  return e;
}

inline void add_unitality(ResidualReport& report, const OperatorUnderTest& op, double t,
                          const CompactSample& grid, double tol) {
  const Observable tu = op.apply(t, unit_observable());
  WorstResidual worst;
  for (const auto& x : grid.points) {
    worst.update(std::abs(tu(x) - Complex{1.0, 0.0}), "1", "", x);
  }
  report.add(entry_from("unitality", worst, tol));
}

}  // namespace detail

/**
 * Multiplicativity residual max |T(fg) - (Tf)(Tg)| over dictionary pairs and
 * grid points, plus the unitality residual |T1 - 1|.
 */
inline ResidualReport check_algebra_homomorphism(const OperatorUnderTest& op, double t,
                                                 const Dictionary& dict, const CompactSample& grid,
                                                 double tol) {
  if (grid.empty()) throw std::invalid_argument("check_algebra_homomorphism: empty grid");
  ResidualReport report;
  report.suite = "check_algebra_homomorphism";
  report.provenance = op.label;
  if (op.kind == OperatorKind::BlackBox) {
    report.assumptions.push_back("strong continuity of the operator family is assumed, not verified");
  }
  std::vector<Observable> mapped;
  mapped.reserve(dict.members.size());
  for (const auto& f : dict.members) mapped.push_back(op.apply(t, f));
  detail::WorstResidual worst;
  for (std::size_t i = 0; i < dict.members.size(); ++i) {
    for (std::size_t j = i; j < dict.members.size(); ++j) {
      const Observable lhs = op.apply(t, alg_product(dict.members[i], dict.members[j]));
      for (const auto& x : grid.points) {
        const double r = std::abs(lhs(x) - mapped[i](x) * mapped[j](x));
        worst.update(r, dict.members[i].label, dict.members[j].label, x);
      }
    }
  }
  report.add(detail::entry_from("multiplicativity", worst, tol));
  detail::add_unitality(report, op, t, grid, tol);
  return report;
}

/// Lattice residual max ||Tf| - T|f|| over the dictionary and grid, plus unitality.
inline ResidualReport check_lattice_homomorphism(const OperatorUnderTest& op, double t,
                                                 const Dictionary& dict, const CompactSample& grid,
                                                 double tol) {
  if (grid.empty()) throw std::invalid_argument("check_lattice_homomorphism: empty grid");
  ResidualReport report;
  report.suite = "check_lattice_homomorphism";
  report.provenance = op.label;
  if (op.kind == OperatorKind::BlackBox) {
    report.assumptions.push_back("strong continuity of the operator family is assumed, not verified");
  }
  detail::WorstResidual worst;
  for (const auto& f : dict.members) {
    const Observable lhs = op.apply(t, f);
    const Observable rhs = op.apply(t, modulus(f));
    for (const auto& x : grid.points) {
      worst.update(std::abs(Complex{std::abs(lhs(x)), 0.0} - rhs(x)), f.label, "", x);
    }
  }
  report.add(detail::entry_from("modulus-preservation", worst, tol));
  detail::add_unitality(report, op, t, grid, tol);
  return report;
}

/// Plumbing pre-check: additivity and complex homogeneity on dictionary pairs.
inline ResidualReport check_linearity(const OperatorUnderTest& op, double t,
                                      const Dictionary& dict, const CompactSample& grid,
                                      double tol) {
  if (grid.empty()) throw std::invalid_argument("check_linearity: empty grid");
  ResidualReport report;
  report.suite = "check_linearity";
  report.provenance = op.label;
  detail::WorstResidual additive;
  detail::WorstResidual homogeneous;
  const std::vector<Complex> scalars = {Complex{2.0, 0.0}, Complex{0.0, 1.0}};
  for (std::size_t i = 0; i < dict.members.size(); ++i) {
    const Observable ti = op.apply(t, dict.members[i]);
    for (std::size_t j = i + 1; j < dict.members.size(); ++j) {
      const Observable lhs = op.apply(t, add(dict.members[i], dict.members[j]));
      const Observable tj = op.apply(t, dict.members[j]);
      for (const auto& x : grid.points) {
        additive.update(std::abs(lhs(x) - ti(x) - tj(x)), dict.members[i].label,
                        dict.members[j].label, x);
      }
    }
    for (Complex c : scalars) {
      const Observable lhs = op.apply(t, scale(c, dict.members[i]));
      for (const auto& x : grid.points) {
        homogeneous.update(std::abs(lhs(x) - c * ti(x)), dict.members[i].label, "", x);
      }
    }
  }
  report.add(detail::entry_from("additivity", additive, tol));
  report.add(detail::entry_from("homogeneity", homogeneous, tol));
  return report;
}

/**
 * Product-rule residual for an arbitrary generator-like map; used both by the
 * finite-difference derivation check and by harness-supplied counterexamples.
 */
inline ResidualReport derivation_residual(
    const std::function<Observable(const Observable&)>& delta, const Observable& f,
    const Observable& g, const CompactSample& grid, double tol) {
  if (grid.empty()) throw std::invalid_argument("derivation_residual: empty grid");
  ResidualReport report;
  report.suite = "derivation_residual";
  const Observable dfg = delta(alg_product(f, g));
  const Observable df = delta(f);
  const Observable dg = delta(g);
  detail::WorstResidual worst;
  for (const auto& x : grid.points) {
    const double r = std::abs(dfg(x) - df(x) * g(x) - f(x) * dg(x));
    worst.update(r, f.label, g.label, x);
  }
  report.add(detail::entry_from("product-rule", worst, tol));
  return report;
}

/**
 * Derivation check delta(fg) = delta(f) g + f delta(g) with the
 * finite-difference generator; the pass threshold is widened pointwise by the
 * combined Richardson error estimates of the three generator evaluations.
 */
inline ResidualReport check_derivation(const Semiflow& flow, const Observable& f,
                                       const Observable& g, const CompactSample& grid, double h,
                                       double tol) {
  if (grid.empty()) throw std::invalid_argument("check_derivation: empty grid");
  ResidualReport report;
  report.suite = "check_derivation";
  report.provenance = flow.label;
  report.assumptions.push_back("f and g are asserted smooth along orbits");
  const Observable fg = alg_product(f, g);
  detail::WorstResidual worst;
  double worst_allowance = 0.0;
  bool all_pass = true;
  for (const auto& x : grid.points) {
    const auto dfg = generator_fd(flow, fg, x, h);
    const auto df = generator_fd(flow, f, x, h);
    const auto dg = generator_fd(flow, g, x, h);
    const double r = std::abs(dfg.value - df.value * g(x) - f(x) * dg.value);
    const double allowance =
        dfg.error_estimate + df.error_estimate * std::abs(g(x)) + std::abs(f(x)) * dg.error_estimate;
    if (r >= worst.value) worst_allowance = allowance;
    worst.update(r, f.label, g.label, x);
    all_pass = all_pass && r < tol + allowance;
  }
  ResidualEntry e = detail::entry_from("product-rule", worst, tol + worst_allowance);
  e.pass = all_pass;
  report.add(std::move(e));
  return report;
}

/**
 * Kato's equality at an atomic measure:
 *   < Re(hsign(conj f)(delta f)), mu > = < |f|, delta' mu >,
 * the left side from pointwise finite-difference generator estimates, the
 * right side from the forward difference of the adjoint pairing (matching the
 * one-sided differentiability of t -> |w + t z|).
 */
inline ResidualReport check_kato(const Semiflow& flow, const Observable& f,
                                 const AtomicMeasure& mu, double h, double eps, double tol) {
  ResidualReport report;
  report.suite = "check_kato";
  report.provenance = flow.label;
  report.assumptions.push_back("f is asserted smooth along orbits");
  Complex lhs{0.0, 0.0};
  double fd_allowance = 0.0;
  for (const auto& atom : mu.atoms) {
    const auto df = generator_fd(flow, f, atom.point, h);
    const Complex integrand = std::real(hsign(std::conj(f(atom.point)), df.value, eps));
    lhs += atom.weight * integrand;
    fd_allowance += std::abs(atom.weight) * df.error_estimate;
  }
  const auto rhs = adjoint_generator_pair(flow, modulus(f), mu, h);
  const double residual = std::abs(lhs - rhs.value);
  const double allowance = fd_allowance + rhs.error_estimate;
  ResidualEntry e;
  e.name = "kato-equality";
  e.witness_f = f.label;
  e.witness_g = mu.label;
  e.value = residual;
  e.residual = residual;
  e.tol = tol + allowance;
  e.pass = residual < tol + allowance;
  report.add(std::move(e));
  return report;
}

enum class OperatorVerdict { KoopmanLike, NotMultiplicative, NotLattice, NotUnital, NotLinear };

inline const char* to_string(OperatorVerdict v) {
  switch (v) {
    case OperatorVerdict::KoopmanLike: return "koopman-like";
    case OperatorVerdict::NotMultiplicative: return "not-multiplicative";
    case OperatorVerdict::NotLattice: return "not-lattice";
    case OperatorVerdict::NotUnital: return "not-unital";
    case OperatorVerdict::NotLinear: return "not-linear";
  }
  return "unknown";
}

struct ClassifyResult {
  OperatorVerdict verdict = OperatorVerdict::KoopmanLike;
  std::vector<StatePoint> point_map;  // recovered psi on the grid, when koopman-like
  ResidualReport linearity;
  ResidualReport algebra;
  ResidualReport lattice;
};

/**
 * Runs the unitality, linearity, algebra and lattice suites; when all pass,
 * recovers the underlying point map per grid point by matching the evaluation
 * functional f -> (op f)(x) against point evaluations over a candidate cloud
 * in the dictionary-feature metric. Requires the dictionary to separate the
 * grid points; a second well-separated candidate matching within tol raises
 * AmbiguousMatchError.
 */
inline ClassifyResult classify_operator(const OperatorUnderTest& op, double t,
                                        const Dictionary& dict, const CompactSample& grid,
                                        const CompactSample& candidates, double tol) {
  if (grid.empty()) throw std::invalid_argument("classify_operator: empty grid");
  if (candidates.empty()) throw std::invalid_argument("classify_operator: empty candidate cloud");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      bool separated = false;
      for (const auto& f : dict.members) {
        if (std::abs(f(grid.points[i]) - f(grid.points[j])) > tol) {
          separated = true;
          break;
        }
      }
      if (!separated) {
        throw PreconditionError("classify_operator: dictionary does not separate grid points " +
                                format_point(grid.points[i]) + " and " +
                                format_point(grid.points[j]));
      }
    }
  }

  ClassifyResult result;
  result.algebra = check_algebra_homomorphism(op, t, dict, grid, tol);
  result.lattice = check_lattice_homomorphism(op, t, dict, grid, tol);
  result.linearity = check_linearity(op, t, dict, grid, tol);

  const ResidualEntry* unital = result.algebra.find("unitality");
  if (unital != nullptr && !unital->pass) {
    result.verdict = OperatorVerdict::NotUnital;
    return result;
  }
  if (!result.linearity.pass) {
    result.verdict = OperatorVerdict::NotLinear;
    return result;
  }
  if (!result.algebra.find("multiplicativity")->pass) {
    result.verdict = OperatorVerdict::NotMultiplicative;
    return result;
  }
  if (!result.lattice.find("modulus-preservation")->pass) {
    result.verdict = OperatorVerdict::NotLattice;
    return result;
  }

  result.verdict = OperatorVerdict::KoopmanLike;
  std::vector<Observable> mapped;
  mapped.reserve(dict.members.size());
  for (const auto& f : dict.members) mapped.push_back(op.apply(t, f));
  const double separation = 10.0 * std::max(candidates.mesh, 1e-12);
  for (const auto& x : grid.points) {
    std::vector<Complex> features;
    features.reserve(dict.members.size());
    for (const auto& tf : mapped) features.push_back(tf(x));
    double best = std::numeric_limits<double>::infinity();
    const StatePoint* best_pt = nullptr;
    for (const auto& y : candidates.points) {
      double dist_feat = 0.0;
      for (std::size_t k = 0; k < dict.members.size(); ++k) {
        dist_feat = std::max(dist_feat, std::abs(dict.members[k](y) - features[k]));
      }
      if (dist_feat < best) {
        best = dist_feat;
        best_pt = &y;
      }
    }
    for (const auto& y : candidates.points) {
      if (distance(y, *best_pt) <= separation) continue;
      double dist_feat = 0.0;
      for (std::size_t k = 0; k < dict.members.size(); ++k) {
        dist_feat = std::max(dist_feat, std::abs(dict.members[k](y) - features[k]));
      }
      if (dist_feat <= best + tol) {
        throw AmbiguousMatchError("classify_operator: candidates " + format_point(*best_pt) +
                                  " and " + format_point(y) + " both match the functional at " +
                                  format_point(x));
      }
    }
    result.point_map.push_back(*best_pt);
  }
  return result;
}

/**
 * Spot-check of strong continuity for a black-box operator family:
 * p_K(op(t + s) f - op(t) f) over a decreasing mesh of s values must fall
 * below tol at the smallest s.
 */
inline ResidualReport strong_continuity_spotcheck(const OperatorUnderTest& op, const Observable& f,
                                                  double t, const std::vector<double>& s_mesh,
                                                  const CompactSample& K, double tol) {
  if (s_mesh.empty()) throw std::invalid_argument("strong_continuity_spotcheck: empty time mesh");
  ResidualReport report;
  report.suite = "strong_continuity_spotcheck";
  report.provenance = op.label;
  report.assumptions.push_back("continuity inferred from a finite time mesh only");
  const Observable base = op.apply(t, f);
  double smallest_s = std::numeric_limits<double>::infinity();
  double at_smallest = 0.0;
  for (double s : s_mesh) {
    const double r = seminorm_K(sub(op.apply(t + s, f), base), K);
    ResidualEntry e;
    e.name = "pK-shift(s=" + std::to_string(s) + ")";
    e.witness_f = f.label;
    e.value = r;
    e.residual = r;
    e.tol = tol;
    e.pass = true;  // per-s values are informational
    report.add(std::move(e));
    if (s < smallest_s) {
      smallest_s = s;
      at_smallest = r;
    }
  }
  ResidualEntry final_entry;
  final_entry.name = "continuity-at-smallest-shift";
  final_entry.witness_f = f.label;
  final_entry.value = at_smallest;
  final_entry.residual = at_smallest;
  final_entry.tol = tol;
  final_entry.pass = at_smallest < tol;
  report.add(std::move(final_entry));
  return report;
}

}  // namespace koop
