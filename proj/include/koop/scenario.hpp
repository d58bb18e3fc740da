#pragma once

/**
 * @file scenario.hpp
 * @brief Scenario configs (one JSON key-value tree per run, schema versioned
 *        by `spec_version`) and the suite runners behind the CLI subcommands.
 *
 * Outputs per run: one deterministic `summary.json` plus flat CSV detail
 * files. Exit convention: 0 all requested suites pass, 1 a suite failed,
 * 2 the scenario failed to parse or validate, 3 runtime error.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "koop/attractor.hpp"
#include "koop/characterize.hpp"
#include "koop/errors.hpp"
#include "koop/geometry.hpp"
#include "koop/koopman.hpp"
#include "koop/observable.hpp"
#include "koop/report.hpp"
#include "koop/semiflow.hpp"
#include "koop/serialize.hpp"

namespace koop {

class ScenarioError : public std::invalid_argument {
public:
  explicit ScenarioError(const std::string& what) : std::invalid_argument(what) {}
};

struct Knobs {
  double h = 1e-3;
  double tol = 1e-6;
  double nu = 1.0;
  double T_max = 30.0;
  std::size_t n_quad = 512;
  double t_op = 1.0;        // operator time for the characterization suites
  double resolvent_tol = 0.0;  // 0 = fall back to tol
  double eps_scale = 1e-9;  // hsign zero-branch band: eps = eps_scale * (1 + bound)
  double tau = 1.0;
  std::size_t max_iter = 40;
  double hausdorff_tol = 1e-4;
  std::size_t basis_count = 3;
  double sharpness = 2.0;
  double decay_tol = 1e-3;
  std::vector<double> times;           // semigroup-law / kernel time list
  std::vector<double> t_grid;          // decay / trajectory grid
  std::vector<double> absorb_t_grid;   // absorbing-time search grid
};

struct Scenario {
  int spec_version = 0;
  std::string name;
  Semiflow flow;
  std::string operator_kind = "koopman";
  Complex operator_scale{1.0, 0.0};
  std::vector<Observable> observables;
  Dictionary dictionary;
  CompactSample grid;
  CompactSample candidates;  // may be empty
  std::vector<AtomicMeasure> measures;
  CompactSample absorbing;  // may be empty
  SetFamily family;
  std::vector<std::string> suites;  // characterize sub-suite filter; empty = all
  Knobs knobs;

  OperatorUnderTest make_operator() const {
    if (operator_kind == "koopman") return koopman_operator_under_test(flow);
    if (operator_kind == "averaging") return averaging_operator(flow);
    if (operator_kind == "conjugation") return conjugation_operator(flow);
    if (operator_kind == "scaled") return scaled_operator(flow, operator_scale);
    throw ScenarioError("unknown operator kind: " + operator_kind);
  }

  bool suite_requested(const std::string& s) const {
    if (suites.empty()) return true;
    for (const auto& q : suites) {
      if (q == s) return true;
    }
    return false;
  }
};

namespace detail {

using nlohmann::json;

inline double require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ScenarioError(what + " must be positive");
  return v;
}

inline StatePoint parse_point(const json& j) {
  if (!j.is_array() || j.empty()) throw ScenarioError("point must be a nonempty array");
  StatePoint p;
  for (const auto& c : j) p.coords.push_back(c.get<double>());
  return p;
}

inline CompactSample parse_sample(const json& j, const std::string& what) {
  if (j.contains("points")) {
    CompactSample s;
    for (const auto& pj : j.at("points")) s.points.push_back(parse_point(pj));
    s.mesh = j.value("mesh", 0.0);
    if (s.empty()) throw ScenarioError(what + ": empty point list");
    if (s.mesh < 0.0) throw ScenarioError(what + ": mesh must be nonnegative");
    return s;
  }
  if (j.contains("box")) {
    std::vector<AxisBounds> box;
    for (const auto& axj : j.at("box")) box.push_back({axj.at(0).get<double>(), axj.at(1).get<double>()});
    const auto n = j.value("n_per_axis", std::size_t{9});
    return grid_sample(box, n);
  }
  const double lo = j.at("lo").get<double>();
  const double hi = j.at("hi").get<double>();
  const auto n = j.at("n").get<std::size_t>();
  if (n == 0) throw ScenarioError(what + ": n must be positive");
  return uniform_sample(lo, hi, n);
}

inline std::vector<double> parse_time_grid(const json& j, const std::string& what) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& t : j) out.push_back(t.get<double>());
  } else {
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = require_positive(j.at("step").get<double>(), what + ".step");
    for (double t = start; t <= stop + 1e-12 * std::max(1.0, stop); t += step) out.push_back(t);
  }
  if (out.empty()) throw ScenarioError(what + ": empty time grid");
  return out;
}

inline DomainChart parse_chart(const json& j) {
  std::vector<AxisBounds> bounds;
  for (const auto& axj : j) bounds.push_back({axj.at(0).get<double>(), axj.at(1).get<double>()});
  return DomainChart{std::move(bounds)};
}

inline VectorField builtin_field(const std::string& name, double rate) {
  if (name == "logistic") {
    return [](const StatePoint& x) { return std::vector<double>{x[0] * (1.0 - x[0])}; };
  }
  if (name == "linear") {
    return [rate](const StatePoint& x) { return std::vector<double>{-rate * x[0]}; };
  }
  if (name == "zero") {
    return [](const StatePoint& x) { return std::vector<double>(x.dim(), 0.0); };
  }
  if (name == "rotation") {
    return [](const StatePoint& x) { return std::vector<double>{-x[1], x[0]}; };
  }
  throw ScenarioError("unknown vector field: " + name);
}

inline Semiflow parse_flow(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "translation") return make_translation_flow();
  if (kind == "compactified-translation") return make_compactified_translation_flow();
  if (kind == "rotation") return make_rotation_flow(j.value("half_width", 2.0));
  if (kind == "ode") {
    const std::string field = j.at("field").get<std::string>();
    const double rate = j.value("rate", 1.0);
    const double step = require_positive(j.at("step").get<double>(), "flow.step");
    const double margin = j.value("exit_margin", 1e-3);
    DomainChart chart = parse_chart(j.at("chart"));
    return make_ode_flow(builtin_field(field, rate), std::move(chart), step, margin,
                         "ode(" + field + ")");
  }
  if (kind == "crandall-liggett") {
    const std::string relation = j.value("relation", "linear-scalar");
    if (relation != "linear-scalar") throw ScenarioError("unknown relation: " + relation);
    const double rate = j.value("rate", 1.0);
    const double tol = require_positive(j.value("tol", 1e-4), "flow.tol");
    const auto k_max = j.value("k_max", std::size_t{65536});
    return crandall_liggett_flow(linear_scalar_relation(rate), tol, k_max);
  }
  throw ScenarioError("unknown flow kind: " + kind);
}

inline Observable parse_observable(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  Observable f;
  if (family == "exp") {
    f = exp_decay_observable(j.value("a", 1.0));
  } else if (family == "gauss") {
    f = gaussian_observable(j.value("a", 1.0), parse_point(j.at("center")));
  } else if (family == "coord") {
    f = coordinate_observable(j.value("axis", std::size_t{0}), j.at("lo").get<double>(),
                              j.at("hi").get<double>());
  } else if (family == "bump") {
    f = bump_observable(parse_point(j.at("center")), j.value("sharpness", 1.0));
  } else if (family == "sin") {
    f = sin_observable(j.value("axis", std::size_t{0}));
  } else if (family == "cexp") {
    f = complex_exponential_observable(j.value("omega", 1.0), j.value("axis", std::size_t{0}));
  } else if (family == "radius") {
    f = radius_observable(j.value("cap", 1.0));
  } else if (family == "sqdist") {
    f = sqdist_observable(parse_point(j.at("center")), j.value("cap", 1.0));
  } else if (family == "const") {
    f = constant_observable(Complex{j.value("re", 1.0), j.value("im", 0.0)});
  } else {
    throw ScenarioError("unknown observable family: " + family);
  }
  if (j.contains("label")) f.label = j.at("label").get<std::string>();
  return f;
}

inline AtomicMeasure parse_measure(const json& j) {
  AtomicMeasure mu;
  mu.label = j.value("label", std::string("measure"));
  for (const auto& aj : j.at("atoms")) {
    const auto& wj = aj.at("weight");
    mu.atoms.push_back({parse_point(aj.at("point")),
                        Complex{wj.at(0).get<double>(), wj.at(1).get<double>()}});
  }
  if (mu.atoms.empty()) throw ScenarioError("measure with no atoms");
  return mu;
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  Scenario sc;
  if (!j.contains("spec_version")) throw ScenarioError("missing spec_version");
  sc.spec_version = j.at("spec_version").get<int>();
  if (sc.spec_version != 1) {
    throw ScenarioError("unsupported spec_version " + std::to_string(sc.spec_version));
  }
  sc.name = j.value("name", std::string("scenario"));
  sc.flow = detail::parse_flow(j.at("flow"));
  if (j.contains("operator")) {
    const auto& oj = j.at("operator");
    sc.operator_kind = oj.value("kind", std::string("koopman"));
    if (oj.contains("scale")) {
      sc.operator_scale = Complex{oj.at("scale").at(0).get<double>(), oj.at("scale").at(1).get<double>()};
    }
  }
  if (j.contains("observables")) {
    for (const auto& fj : j.at("observables")) sc.observables.push_back(detail::parse_observable(fj));
  }
  int product_depth = 1;
  bool include_moduli = false;
  if (j.contains("dictionary")) {
    product_depth = j.at("dictionary").value("product_depth", 1);
    include_moduli = j.at("dictionary").value("include_moduli", false);
  }
  sc.dictionary = make_dictionary(sc.observables, product_depth, include_moduli);
  if (j.contains("grid")) sc.grid = detail::parse_sample(j.at("grid"), "grid");
  if (j.contains("candidates")) sc.candidates = detail::parse_sample(j.at("candidates"), "candidates");
  if (j.contains("measures")) {
    for (const auto& mj : j.at("measures")) sc.measures.push_back(detail::parse_measure(mj));
  }
  if (j.contains("attractor")) {
    const auto& aj = j.at("attractor");
    sc.absorbing = detail::parse_sample(aj.at("absorbing"), "attractor.absorbing");
    for (const auto& bj : aj.at("family")) {
      sc.family.members.push_back(detail::parse_sample(bj, "attractor.family"));
    }
    sc.family.label = "B";
  }
  if (j.contains("suites")) {
    for (const auto& s : j.at("suites")) sc.suites.push_back(s.get<std::string>());
  }
  if (j.contains("knobs")) {
    const auto& kj = j.at("knobs");
    auto& k = sc.knobs;
    k.h = detail::require_positive(kj.value("h", k.h), "knobs.h");
    k.tol = detail::require_positive(kj.value("tol", k.tol), "knobs.tol");
    k.nu = detail::require_positive(kj.value("nu", k.nu), "knobs.nu");
    k.T_max = detail::require_positive(kj.value("T_max", k.T_max), "knobs.T_max");
    k.n_quad = kj.value("n_quad", k.n_quad);
    if (k.n_quad == 0) throw ScenarioError("knobs.n_quad must be positive");
    k.t_op = kj.value("t", k.t_op);
    k.resolvent_tol = kj.value("resolvent_tol", k.resolvent_tol);
    k.eps_scale = kj.value("eps_scale", k.eps_scale);
    k.tau = detail::require_positive(kj.value("tau", k.tau), "knobs.tau");
    k.max_iter = kj.value("max_iter", k.max_iter);
    if (k.max_iter == 0) throw ScenarioError("knobs.max_iter must be positive");
    k.hausdorff_tol = detail::require_positive(kj.value("hausdorff_tol", k.hausdorff_tol),
                                               "knobs.hausdorff_tol");
    k.basis_count = kj.value("basis_count", k.basis_count);
    if (k.basis_count == 0) throw ScenarioError("knobs.basis_count must be positive");
    k.sharpness = detail::require_positive(kj.value("sharpness", k.sharpness), "knobs.sharpness");
    k.decay_tol = detail::require_positive(kj.value("decay_tol", k.decay_tol), "knobs.decay_tol");
    if (kj.contains("times")) k.times = detail::parse_time_grid(kj.at("times"), "knobs.times");
    if (kj.contains("t_grid")) k.t_grid = detail::parse_time_grid(kj.at("t_grid"), "knobs.t_grid");
    if (kj.contains("absorb_t_grid")) {
      k.absorb_t_grid = detail::parse_time_grid(kj.at("absorb_t_grid"), "knobs.absorb_t_grid");
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario schema error: ") + e.what());
  }
}

struct RunOptions {
  std::string out_dir = ".";
  double tol_scale = 1.0;
  bool quiet = false;
};

struct RunOutcome {
  bool pass = true;
  std::vector<ResidualReport> reports;
};

namespace detail {

inline void note(const RunOptions& opt, const std::string& line) {
  if (!opt.quiet) std::printf("%s\n", line.c_str());
}

inline void note_report(const RunOptions& opt, const ResidualReport& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.suite << " max residual " << r.max_residual();
  note(opt, os.str());
}

inline std::ofstream open_out(const RunOptions& opt, const std::string& file) {
  std::filesystem::create_directories(opt.out_dir);
  std::ofstream os(std::filesystem::path(opt.out_dir) / file);
  if (!os) throw std::runtime_error("cannot open output file: " + file);
  return os;
}

inline void write_summary(const RunOptions& opt, const Scenario& sc, const std::string& sub,
                          const RunOutcome& outcome,
                          const std::function<void(JsonWriter&)>& extra = {}) {
  auto os = open_out(opt, "summary.json");
  JsonWriter w(os);
  w.begin_object();
  w.key("spec_version");
  w.value(sc.spec_version);
  w.key("scenario");
  w.value(sc.name);
  w.key("subcommand");
  w.value(sub);
  w.key("tol_scale");
  w.value(opt.tol_scale);
  w.key("pass");
  w.value(outcome.pass);
  w.key("suites");
  w.begin_array();
  for (const auto& r : outcome.reports) write_report(w, r);
  w.end_array();
  if (extra) extra(w);
  w.end_object();
  os << '\n';
}

inline void write_detail_csv(const RunOptions& opt, const RunOutcome& outcome) {
  auto os = open_out(opt, "detail.csv");
  write_report_csv_header(os);
  for (const auto& r : outcome.reports) write_report_csv_rows(os, r);
}

}  // namespace detail

/// `simulate`: trajectories of the grid points over the time grid, as CSV.
inline RunOutcome run_simulate(const Scenario& sc, const RunOptions& opt) {
  if (sc.grid.empty()) throw ScenarioError("simulate: scenario has no grid");
  const auto& t_grid = sc.knobs.t_grid.empty() ? sc.knobs.times : sc.knobs.t_grid;
  if (t_grid.empty()) throw ScenarioError("simulate: scenario has no t_grid");
  auto os = detail::open_out(opt, "trajectory.csv");
  os << "point_index,t";
  for (std::size_t a = 0; a < sc.flow.chart.dimension(); ++a) os << ",x" << a;
  os << '\n';
  for (std::size_t i = 0; i < sc.grid.size(); ++i) {
    for (double t : t_grid) {
      const StatePoint y = sc.flow.evaluate(t, sc.grid.points[i]);
      os << i << ',' << format_double(t);
      for (double c : y.coords) os << ',' << format_double(c);
      os << '\n';
    }
  }
  RunOutcome outcome;
  detail::write_summary(opt, sc, "simulate", outcome, [&](JsonWriter& w) {
    w.key("points");
    w.value(sc.grid.size());
    w.key("times");
    w.value(t_grid.size());
  });
  detail::note(opt, "[PASS] simulate: wrote trajectory.csv");
  return outcome;
}

/// `check-laws`: identity and semigroup-law residuals of the scenario flow.
inline RunOutcome run_check_laws(const Scenario& sc, const RunOptions& opt) {
  if (sc.grid.empty()) throw ScenarioError("check-laws: scenario has no grid");
  if (sc.knobs.times.empty()) throw ScenarioError("check-laws: scenario has no times");
  RunOutcome outcome;
  outcome.reports.push_back(
      check_semiflow_laws(sc.flow, sc.grid, sc.knobs.times, sc.knobs.tol * opt.tol_scale));
  outcome.pass = outcome.reports.back().pass;
  detail::note_report(opt, outcome.reports.back());
  detail::write_summary(opt, sc, "check-laws", outcome);
  detail::write_detail_csv(opt, outcome);
  return outcome;
}

/// `generator`: gridwise finite-difference generator table per observable.
inline RunOutcome run_generator(const Scenario& sc, const RunOptions& opt) {
  if (sc.grid.empty()) throw ScenarioError("generator: scenario has no grid");
  if (sc.observables.empty()) throw ScenarioError("generator: scenario has no observables");
  RunOutcome outcome;
  auto os = detail::open_out(opt, "generator.csv");
  os << "observable,point,re,im,error_estimate\n";
  double worst_err = 0.0;
  for (const auto& f : sc.observables) {
    for (const auto& x : sc.grid.points) {
      const auto est = generator_fd(sc.flow, f, x, sc.knobs.h);
      os << csv_field(f.label) << ',' << csv_field(format_point(x)) << ','
         << format_double(est.value.real()) << ',' << format_double(est.value.imag()) << ','
         << format_double(est.error_estimate) << '\n';
      worst_err = std::max(worst_err, est.error_estimate);
    }
  }
  detail::write_summary(opt, sc, "generator", outcome, [&](JsonWriter& w) {
    w.key("h");
    w.value(sc.knobs.h);
    w.key("max_error_estimate");
    w.value(worst_err);
  });
  std::ostringstream msg;
  msg << "[PASS] generator: table written, max error estimate " << worst_err;
  detail::note(opt, msg.str());
  return outcome;
}

/// `resolvent`: Laplace resolvent table plus the resolvent-identity residual.
inline RunOutcome run_resolvent(const Scenario& sc, const RunOptions& opt) {
  if (sc.grid.empty()) throw ScenarioError("resolvent: scenario has no grid");
  if (sc.observables.empty()) throw ScenarioError("resolvent: scenario has no observables");
  RunOutcome outcome;
  auto os = detail::open_out(opt, "resolvent.csv");
  os << "observable,point,re,im,quad_error,truncation_error\n";
  const auto& k = sc.knobs;
  for (const auto& f : sc.observables) {
    const auto res = resolvent_laplace(sc.flow, f, k.nu, k.T_max, k.n_quad, sc.grid);
    for (const auto& x : sc.grid.points) {
      const Complex u = res.observable(x);
      os << csv_field(f.label) << ',' << csv_field(format_point(x)) << ','
         << format_double(u.real()) << ',' << format_double(u.imag()) << ','
         << format_double(res.quad_error) << ',' << format_double(res.truncation_error) << '\n';
    }
    const double id_tol = (k.resolvent_tol > 0.0 ? k.resolvent_tol : k.tol) * opt.tol_scale;
    outcome.reports.push_back(
        check_resolvent_identity(sc.flow, f, k.nu, k.T_max, k.n_quad, sc.grid, k.h, id_tol));
    outcome.pass = outcome.pass && outcome.reports.back().pass;
    detail::note_report(opt, outcome.reports.back());
  }
  detail::write_summary(opt, sc, "resolvent", outcome, [&](JsonWriter& w) {
    w.key("nu");
    w.value(k.nu);
    w.key("T_max");
    w.value(k.T_max);
    w.key("n_quad");
    w.value(k.n_quad);
  });
  detail::write_detail_csv(opt, outcome);
  return outcome;
}

/// `characterize`: homomorphism suites, generator suites and classification.
inline RunOutcome run_characterize(const Scenario& sc, const RunOptions& opt) {
  if (sc.grid.empty()) throw ScenarioError("characterize: scenario has no grid");
  const OperatorUnderTest op = sc.make_operator();
  const double t = sc.knobs.t_op;
  const double tol = sc.knobs.tol * opt.tol_scale;
  RunOutcome outcome;
  std::string verdict = "not-run";
  std::vector<StatePoint> point_map;

  if (sc.suite_requested("classify") && !sc.candidates.empty()) {
    ClassifyResult cls = classify_operator(op, t, sc.dictionary, sc.grid, sc.candidates, tol);
    verdict = to_string(cls.verdict);
    point_map = std::move(cls.point_map);
    outcome.reports.push_back(std::move(cls.algebra));
    outcome.reports.push_back(std::move(cls.lattice));
    outcome.reports.push_back(std::move(cls.linearity));
  } else {
    if (sc.suite_requested("algebra")) {
      outcome.reports.push_back(check_algebra_homomorphism(op, t, sc.dictionary, sc.grid, tol));
    }
    if (sc.suite_requested("lattice")) {
      outcome.reports.push_back(check_lattice_homomorphism(op, t, sc.dictionary, sc.grid, tol));
    }
    if (sc.suite_requested("linearity")) {
      outcome.reports.push_back(check_linearity(op, t, sc.dictionary, sc.grid, tol));
    }
  }

  const bool generator_suites = sc.operator_kind == "koopman";
  if (generator_suites && sc.suite_requested("derivation") && sc.observables.size() >= 2) {
    outcome.reports.push_back(check_derivation(sc.flow, sc.observables[0], sc.observables[1],
                                               sc.grid, sc.knobs.h, tol));
  }
  if (generator_suites && sc.suite_requested("kato") && !sc.observables.empty()) {
    for (const auto& mu : sc.measures) {
      const double eps = sc.knobs.eps_scale * (1.0 + sc.observables[0].bound);
      outcome.reports.push_back(check_kato(sc.flow, sc.observables[0], mu, sc.knobs.h, eps, tol));
    }
  }

  for (const auto& r : outcome.reports) outcome.pass = outcome.pass && r.pass;
  for (const auto& r : outcome.reports) detail::note_report(opt, r);
  if (verdict != "not-run") detail::note(opt, "verdict: " + verdict);

  detail::write_summary(opt, sc, "characterize", outcome, [&](JsonWriter& w) {
    w.key("operator");
    w.value(op.label);
    w.key("t");
    w.value(t);
    w.key("verdict");
    w.value(verdict);
    if (!point_map.empty()) {
      w.key("point_map");
      w.begin_array();
      for (std::size_t i = 0; i < point_map.size(); ++i) {
        w.begin_object();
        w.key("from");
        write_point(w, sc.grid.points[i]);
        w.key("to");
        write_point(w, point_map[i]);
        w.end_object();
      }
      w.end_array();
    }
  });
  detail::write_detail_csv(opt, outcome);
  return outcome;
}

/// `attractor`: absorbing times, forward-iteration attractor, ideal decay.
inline RunOutcome run_attractor(const Scenario& sc, const RunOptions& opt) {
  if (sc.absorbing.empty()) throw ScenarioError("attractor: scenario has no absorbing set");
  if (sc.family.members.empty()) throw ScenarioError("attractor: scenario has no family");
  if (sc.knobs.t_grid.empty()) throw ScenarioError("attractor: scenario has no t_grid");
  const auto& k = sc.knobs;
  const auto& absorb_grid = k.absorb_t_grid.empty() ? k.t_grid : k.absorb_t_grid;
  RunOutcome outcome;

  AbsorbingReport absorbing =
      find_absorbing_time(sc.flow, sc.family, sc.absorbing, absorb_grid, k.tol * opt.tol_scale);
  outcome.reports.push_back(absorbing.report);

  AttractorResult result = smallest_attractor(sc.flow, sc.absorbing, k.tau, k.max_iter, k.hausdorff_tol);
  for (std::size_t i = 0; i < absorbing.entry_times.size(); ++i) {
    if (absorbing.entry_times[i]) {
      result.absorbed_times.emplace_back("B" + std::to_string(i), *absorbing.entry_times[i]);
    }
  }
  ResidualReport conv;
  conv.suite = "smallest_attractor";
  conv.provenance = sc.flow.label;
  ResidualEntry ce;
  ce.name = "converged";
  ce.value = result.converged ? 1.0 : 0.0;
  ce.residual = result.converged ? 0.0 : 1.0;
  ce.tol = 0.5;
  ce.pass = result.converged;
  conv.add(std::move(ce));
  outcome.reports.push_back(conv);

  outcome.reports.push_back(check_invariance(sc.flow, result.attractor, {k.tau}, k.hausdorff_tol));

  IdealDecayCheck decay = ideal_of_attractor_check(sc.flow, result, sc.family, sc.dictionary,
                                                   k.t_grid, k.decay_tol * opt.tol_scale,
                                                   k.basis_count, k.sharpness);
  outcome.reports.push_back(decay.report);

  for (const auto& r : outcome.reports) outcome.pass = outcome.pass && r.pass;
  for (const auto& r : outcome.reports) detail::note_report(opt, r);

  {
    auto os = detail::open_out(opt, "attractor.json");
    JsonWriter w(os);
    write_attractor_result(w, result);
    os << '\n';
  }
  {
    auto os = detail::open_out(opt, "decay_curves.csv");
    write_decay_curves_csv(os, decay.curves);
  }
  detail::write_summary(opt, sc, "attractor", outcome, [&](JsonWriter& w) {
    w.key("attractor");
    write_attractor_result(w, result);
  });
  detail::write_detail_csv(opt, outcome);
  return outcome;
}

/// Dispatch a subcommand; returns true iff every requested suite passed.
inline RunOutcome run_subcommand(const std::string& sub, const Scenario& sc, const RunOptions& opt) {
  if (sub == "simulate") return run_simulate(sc, opt);
  if (sub == "check-laws") return run_check_laws(sc, opt);
  if (sub == "generator") return run_generator(sc, opt);
  if (sub == "resolvent") return run_resolvent(sc, opt);
  if (sub == "characterize") return run_characterize(sc, opt);
  if (sub == "attractor") return run_attractor(sc, opt);
  throw ScenarioError("unknown subcommand: " + sub);
}

}  // namespace koop
