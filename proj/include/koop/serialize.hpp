#pragma once

/**
 * @file serialize.hpp
 * @brief Deterministic JSON and CSV emission for reports and results.
 *
 * Summaries must be byte-identical across runs of the same scenario, so
 * numbers are always printed with "%.17g" in the C locale and object keys are
 * emitted in insertion order by the code below.
 */

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "koop/attractor.hpp"
#include "koop/geometry.hpp"
#include "koop/report.hpp"

namespace koop {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

/// Minimal streaming JSON writer; keys appear in call order.
class JsonWriter {
public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  void begin_object() { separator(); os_ << '{'; stack_.push_back(true); }
  void end_object() { os_ << '}'; stack_.pop_back(); mark_value(); }
  void begin_array() { separator(); os_ << '['; stack_.push_back(true); }
  void end_array() { os_ << ']'; stack_.pop_back(); mark_value(); }

  void key(const std::string& k) {
    separator();
    os_ << '"' << json_escape(k) << "\":";
    pending_key_ = true;
  }

  void value(const std::string& v) { separator(); os_ << '"' << json_escape(v) << '"'; mark_value(); }
  void value(const char* v) { value(std::string(v)); }
  void value(double v) { separator(); os_ << format_double(v); mark_value(); }
  void value(int v) { separator(); os_ << v; mark_value(); }
  void value(std::size_t v) { separator(); os_ << v; mark_value(); }
  void value(bool v) { separator(); os_ << (v ? "true" : "false"); mark_value(); }

private:
  void separator() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (!stack_.empty() && !stack_.back()) os_ << ',';
  }
  void mark_value() {
    if (!stack_.empty()) stack_.back() = false;
  }

  std::ostream& os_;
  std::vector<bool> stack_;  // true = container still empty
  bool pending_key_ = false;
};

inline void write_point(JsonWriter& w, const StatePoint& p) {
  w.begin_array();
  for (double c : p.coords) w.value(c);
  w.end_array();
}

inline void write_report(JsonWriter& w, const ResidualReport& report) {
  w.begin_object();
  w.key("suite");
  w.value(report.suite);
  w.key("provenance");
  w.value(report.provenance);
  w.key("pass");
  w.value(report.pass);
  w.key("max_residual");
  w.value(report.max_residual());
  if (!report.assumptions.empty()) {
    w.key("assumptions");
    w.begin_array();
    for (const auto& a : report.assumptions) w.value(a);
    w.end_array();
  }
  if (!report.warnings.empty()) {
    w.key("warnings");
    w.begin_array();
    for (const auto& wng : report.warnings) w.value(wng);
    w.end_array();
  }
  w.key("entries");
  w.begin_array();
  for (const auto& e : report.entries) {
    w.begin_object();
    w.key("name");
    w.value(e.name);
    if (!e.witness_f.empty()) {
      w.key("witness_f");
      w.value(e.witness_f);
    }
    if (!e.witness_g.empty()) {
      w.key("witness_g");
      w.value(e.witness_g);
    }
    if (!e.point.empty()) {
      w.key("point");
      w.value(e.point);
    }
    w.key("value");
    w.value(e.value);
    w.key("residual");
    w.value(e.residual);
    w.key("tol");
    w.value(e.tol);
    w.key("pass");
    w.value(e.pass);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline void write_attractor_result(JsonWriter& w, const AttractorResult& result) {
  w.begin_object();
  w.key("converged");
  w.value(result.converged);
  w.key("iterations");
  w.value(result.iterations);
  w.key("mesh");
  w.value(result.attractor.mesh);
  w.key("points");
  w.begin_array();
  for (const auto& p : result.attractor.points) write_point(w, p);
  w.end_array();
  w.key("hausdorff_history");
  w.begin_array();
  for (double d : result.hausdorff_history) w.value(d);
  w.end_array();
  w.key("absorbed_times");
  w.begin_array();
  for (const auto& [label, t] : result.absorbed_times) {
    w.begin_object();
    w.key("member");
    w.value(label);
    w.key("t0");
    w.value(t);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

/// Flat residual CSV: suite,witness_f,witness_g,point,value,residual,tol,pass
inline void write_report_csv_header(std::ostream& os) {
  os << "suite,witness_f,witness_g,point,value,residual,tol,pass\n";
}

inline void write_report_csv_rows(std::ostream& os, const ResidualReport& report) {
  for (const auto& e : report.entries) {
    os << csv_field(report.suite + (e.name.empty() ? "" : "/" + e.name)) << ','
       << csv_field(e.witness_f) << ',' << csv_field(e.witness_g) << ',' << csv_field(e.point)
       << ',' << format_double(e.value) << ',' << format_double(e.residual) << ','
       << format_double(e.tol) << ',' << (e.pass ? "true" : "false") << '\n';
  }
}

/// Decay curves CSV: member,function,t,value
inline void write_decay_curves_csv(std::ostream& os, const std::vector<DecayCurve>& curves) {
  os << "member,function,t,value\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      os << csv_field(c.set_label) << ',' << csv_field(c.fn_label) << ','
         << format_double(c.times[i]) << ',' << format_double(c.values[i]) << '\n';
    }
  }
}

}  // namespace koop
