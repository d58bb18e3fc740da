#pragma once

/**
 * @file semiflow.hpp
 * @brief Continuous semiflows: closed-form maps, fixed-step RK4 flows of ODE
 *        vector fields, and nonlinear semigroups built by resolvent iteration.
 *
 * A semiflow is a family of self-maps phi_t (t >= 0) of a chart with
 * phi_0 = id and phi_s . phi_t = phi_{s+t}. Closed-form flows satisfy the
 * laws exactly; numerical flows satisfy them within their stated accuracy,
 * which `check_semiflow_laws` measures on a finite grid.
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "koop/errors.hpp"
#include "koop/geometry.hpp"
#include "koop/report.hpp"

namespace koop {

enum class FlowKind { ClosedForm, Ode, CrandallLiggett };

inline const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::ClosedForm: return "closed-form";
    case FlowKind::Ode: return "ode";
    case FlowKind::CrandallLiggett: return "crandall-liggett";
  }
  return "unknown";
}

struct Semiflow {
  DomainChart chart;
  std::function<StatePoint(double, const StatePoint&)> map;
  double accuracy = 0.0;  // estimated error constant; 0 for exact flows
  int error_order = 0;    // local error order of the scheme; 0 for exact flows
  FlowKind kind = FlowKind::ClosedForm;
  std::string label;

  /// t = 0 always short-circuits to the identity.
  StatePoint evaluate(double t, const StatePoint& x) const {
    if (t < 0.0) throw std::invalid_argument("Semiflow::evaluate: t must be nonnegative");
    if (t == 0.0) return x;
    return map(t, x);
  }
};

/// The translation semiflow x -> x + t on [0, inf).
inline Semiflow make_translation_flow() {
  Semiflow flow;
  flow.chart = half_line_chart();
  flow.map = [](double t, const StatePoint& x) { return StatePoint::scalar(x[0] + t); };
  flow.kind = FlowKind::ClosedForm;
  flow.label = "translation";
  return flow;
}

/**
 * Translation pushed through the compactification y = x/(1+x) of [0, inf].
 * In chart coordinates: y -> (y + t(1-y)) / (1 + t(1-y)), with y = 1 (the
 * point at infinity) fixed.
 */
inline Semiflow make_compactified_translation_flow() {
  Semiflow flow;
  flow.chart = compactified_half_line_chart();
  flow.map = [](double t, const StatePoint& p) {
    const double y = p[0];
    const double u = t * (1.0 - y);
    return StatePoint::scalar((y + u) / (1.0 + u));
  };
  flow.kind = FlowKind::ClosedForm;
  flow.label = "compactified-translation";
  return flow;
}

/// Rigid rotation of the plane, restricted to a square chart that contains it.
inline Semiflow make_rotation_flow(double half_width = 2.0) {
  Semiflow flow;
  flow.chart = DomainChart{{AxisBounds{-half_width, half_width}, AxisBounds{-half_width, half_width}}};
  flow.map = [](double t, const StatePoint& p) {
    const double c = std::cos(t), s = std::sin(t);
    return StatePoint{{c * p[0] - s * p[1], s * p[0] + c * p[1]}};
  };
  flow.kind = FlowKind::ClosedForm;
  flow.label = "rotation";
  return flow;
}

using VectorField = std::function<std::vector<double>(const StatePoint&)>;

namespace detail {

inline StatePoint rk4_step(const VectorField& field, const StatePoint& x, double h) {
  const std::size_t d = x.dim();
  const auto k1 = field(x);
  StatePoint tmp = x;
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  const auto k2 = field(tmp);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  const auto k3 = field(tmp);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
  const auto k4 = field(tmp);
  StatePoint out = x;
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

inline StatePoint enforce_chart(const DomainChart& chart, StatePoint p, double margin,
                                const std::string& label) {
  const double exit = chart.exit_distance(p);
  if (exit > margin) {
    std::ostringstream os;
    os << "flow '" << label << "': trajectory left the chart by " << exit << " at "
       << format_point(p) << " (margin " << margin << ")";
    throw DomainExitError(os.str());
  }
  return exit > 0.0 ? chart.clamp(std::move(p)) : p;
}

}  // namespace detail

/**
 * Fixed-step classical RK4 flow of a vector field on a box chart. The final
 * partial step lands on t exactly. Trajectories are clamped to the chart and
 * raise DomainExitError when they leave it by more than `exit_margin`.
 */
inline Semiflow make_ode_flow(VectorField field, DomainChart chart, double step,
                              double exit_margin = 1e-3, std::string label = "ode-rk4") {
  if (step <= 0.0) throw std::invalid_argument("make_ode_flow: step must be positive");
  Semiflow flow;
  flow.chart = chart;
  flow.accuracy = std::pow(step, 4);
  flow.error_order = 4;
  flow.kind = FlowKind::Ode;
  flow.label = std::move(label);
  flow.map = [field = std::move(field), chart = std::move(chart), step, exit_margin,
              name = flow.label](double t, const StatePoint& x0) {
    StatePoint x = x0;
    const auto n_full = static_cast<std::uint64_t>(t / step);
    for (std::uint64_t i = 0; i < n_full; ++i) {
      x = detail::enforce_chart(chart, detail::rk4_step(field, x, step), exit_margin, name);
    }
    const double rem = t - static_cast<double>(n_full) * step;
    if (rem > 1e-14 * std::max(1.0, t)) {
      x = detail::enforce_chart(chart, detail::rk4_step(field, x, rem), exit_margin, name);
    }
    return x;
  };
  return flow;
}

/**
 * A relation presented through its resolvent (Id + lambda A)^{-1}. The
 * accretivity hypothesis is that the resolvent is `lipschitz_claim`-Lipschitz
 * for small lambda; `check_accretive` spot-checks it on sampled pairs.
 */
struct AccretiveRelation {
  std::function<StatePoint(double, const StatePoint&)> resolvent;  // (lambda, x)
  double lipschitz_claim = 1.0;
  DomainChart domain_closure;
  std::string label;
};

/// Scalar relation A x = rate * x, with resolvent x / (1 + rate * lambda).
inline AccretiveRelation linear_scalar_relation(double rate) {
  AccretiveRelation rel;
  rel.resolvent = [rate](double lambda, const StatePoint& x) {
    return StatePoint::scalar(x[0] / (1.0 + rate * lambda));
  };
  rel.lipschitz_claim = 1.0;
  rel.domain_closure = half_line_chart();
  rel.label = "linear-scalar";
  return rel;
}

struct AccretiveCheckOptions {
  std::size_t n_pairs = 64;
  std::vector<double> lambdas = {0.01, 0.05, 0.1, 0.5, 1.0};
  double window = 10.0;  // sampling window span on half-infinite axes
  std::uint32_t seed = 0x5eed;
  double slack = 1e-9;
};

/// Sampled 1-Lipschitz accretivity check of a resolvent.
inline ResidualReport check_accretive(const AccretiveRelation& rel,
                                      const AccretiveCheckOptions& opts = {}) {
  ResidualReport report;
  report.suite = "check_accretive";
  report.provenance = rel.label;
  std::mt19937 rng(opts.seed);
  const auto& chart = rel.domain_closure;
  const std::size_t d = chart.dimension();
  auto draw = [&](std::size_t axis) {
    const auto& ax = chart.bounds[axis];
    const double lo = std::isfinite(ax.lo) ? ax.lo : -opts.window;
    const double hi = std::isfinite(ax.hi) ? ax.hi : lo + opts.window;
    return std::uniform_real_distribution<double>(lo, std::min(hi, lo + opts.window))(rng);
  };
  double worst_ratio = 0.0;
  std::string worst_witness;
  for (std::size_t k = 0; k < opts.n_pairs; ++k) {
    StatePoint x, y;
    x.coords.resize(d);
    y.coords.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = draw(i);
      y[i] = draw(i);
    }
    const double base = distance(x, y);
    if (base < 1e-12) continue;
    for (double lambda : opts.lambdas) {
      const double moved = distance(rel.resolvent(lambda, x), rel.resolvent(lambda, y));
      const double ratio = moved / base;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        std::ostringstream os;
        os << format_point(x) << " vs " << format_point(y) << " at lambda=" << lambda;
        worst_witness = os.str();
      }
    }
  }
  ResidualEntry e;
  e.name = "lipschitz-ratio";
  e.point = worst_witness;
  e.value = worst_ratio;
  e.residual = std::max(0.0, worst_ratio - rel.lipschitz_claim);
  e.tol = opts.slack;
  e.pass = worst_ratio <= rel.lipschitz_claim * (1.0 + opts.slack);
  report.add(std::move(e));
  return report;
}

/// k-fold composition of the resolvent at lambda = t/k applied to x.
inline StatePoint crandall_liggett_evolve(const AccretiveRelation& rel, double t,
                                          const StatePoint& x, std::size_t k) {
  if (k == 0) throw std::invalid_argument("crandall_liggett_evolve: k must be positive");
  if (t < 0.0) throw std::invalid_argument("crandall_liggett_evolve: t must be nonnegative");
  if (t == 0.0) return x;
  const double lambda = t / static_cast<double>(k);
  StatePoint y = x;
  for (std::size_t i = 0; i < k; ++i) y = rel.resolvent(lambda, y);
  return y;
}

/**
 * Semiflow from resolvent iteration: per evaluation, double k starting at 8
 * until successive iterates differ by less than `tol` or `k_max` is reached.
 * Construction runs the sampled Lipschitz check and rejects relations that
 * fail it.
 */
inline Semiflow crandall_liggett_flow(AccretiveRelation rel, double tol, std::size_t k_max,
                                      const AccretiveCheckOptions& check_opts = {}) {
  if (tol <= 0.0) throw std::invalid_argument("crandall_liggett_flow: tol must be positive");
  if (k_max < 16) throw std::invalid_argument("crandall_liggett_flow: k_max must be at least 16");
  const auto check = check_accretive(rel, check_opts);
  if (!check.pass) {
    std::ostringstream os;
    os << "crandall_liggett_flow: relation '" << rel.label
       << "' fails the sampled Lipschitz check (ratio " << check.entries.front().value
       << " > claim " << rel.lipschitz_claim << ")";
    throw PreconditionError(os.str());
  }
  Semiflow flow;
  flow.chart = rel.domain_closure;
  flow.accuracy = tol;
  flow.error_order = 1;
  flow.kind = FlowKind::CrandallLiggett;
  flow.label = rel.label.empty() ? "crandall-liggett" : "crandall-liggett(" + rel.label + ")";
  flow.map = [rel = std::move(rel), tol, k_max, name = flow.label](double t, const StatePoint& x) {
    std::size_t k = 8;
    StatePoint prev = crandall_liggett_evolve(rel, t, x, k);
    while (2 * k <= k_max) {
      k *= 2;
      StatePoint next = crandall_liggett_evolve(rel, t, x, k);
      if (distance(prev, next) < tol) return next;
      prev = std::move(next);
    }
    std::ostringstream os;
    os << "flow '" << name << "': resolvent iteration still above tol " << tol
       << " at k_max=" << k_max;
    throw ConvergenceError(os.str());
  };
  return flow;
}

/**
 * Residuals of the semiflow laws on a finite grid: the identity law
 * max ||phi_0(x) - x|| and the semigroup law
 * max over (s, t) pairs of ||phi_s(phi_t(x)) - phi_{s+t}(x)||.
 */
inline ResidualReport check_semiflow_laws(const Semiflow& flow, const CompactSample& grid,
                                          const std::vector<double>& times, double tol) {
  if (grid.empty()) throw std::invalid_argument("check_semiflow_laws: empty grid");
  ResidualReport report;
  report.suite = "check_semiflow_laws";
  report.provenance = flow.label;

  double id_resid = 0.0;
  std::string id_witness;
  for (const auto& x : grid.points) {
    const double r = distance(flow.evaluate(0.0, x), x);
    if (r >= id_resid) {
      id_resid = r;
      id_witness = format_point(x);
    }
  }
  ResidualEntry id_entry;
  id_entry.name = "identity-law";
  id_entry.point = id_witness;
  id_entry.value = id_resid;
  id_entry.residual = id_resid;
  id_entry.tol = tol;
  id_entry.pass = id_resid < tol;
  report.add(std::move(id_entry));

  double law_resid = 0.0;
  std::string law_witness;
  for (const auto& x : grid.points) {
    for (double t : times) {
      const StatePoint via_t = flow.evaluate(t, x);
      for (double s : times) {
        const double r = distance(flow.evaluate(s, via_t), flow.evaluate(s + t, x));
        if (r >= law_resid) {
          law_resid = r;
          std::ostringstream os;
          os << format_point(x) << " s=" << s << " t=" << t;
          law_witness = os.str();
        }
      }
    }
  }
  ResidualEntry law_entry;
  law_entry.name = "semigroup-law";
  law_entry.point = law_witness;
  law_entry.value = law_resid;
  law_entry.residual = law_resid;
  law_entry.tol = tol;
  law_entry.pass = law_resid < tol;
  report.add(std::move(law_entry));
  return report;
}

/// Displacement-ratio diagnostic for joint continuity; no pass/fail verdict.
struct ContinuityReport {
  double max_space_ratio = 0.0;  // ||phi_t(x+dx) - phi_t(x)|| / ||dx||
  double max_time_ratio = 0.0;   // ||phi_{t+dt}(x) - phi_t(x)|| / dt
  std::string space_witness;
  std::string time_witness;
};

inline ContinuityReport continuity_modulus(const Semiflow& flow, const CompactSample& grid,
                                           const std::vector<double>& times, double probe_radius) {
  if (probe_radius <= 0.0) throw std::invalid_argument("continuity_modulus: probe_radius must be positive");
  ContinuityReport rep;
  const std::size_t d = flow.chart.dimension();
  for (const auto& x : grid.points) {
    for (double t : times) {
      const StatePoint base = flow.evaluate(t, x);
      for (std::size_t axis = 0; axis < d; ++axis) {
        for (double sign : {1.0, -1.0}) {
          StatePoint shifted = x;
          shifted[axis] += sign * probe_radius;
          shifted = flow.chart.clamp(std::move(shifted));
          const double dx = distance(shifted, x);
          if (dx < 1e-15) continue;
          const double ratio = distance(flow.evaluate(t, shifted), base) / dx;
          if (ratio > rep.max_space_ratio) {
            rep.max_space_ratio = ratio;
            std::ostringstream os;
            os << format_point(x) << " axis " << axis << " t=" << t;
            rep.space_witness = os.str();
          }
        }
      }
      for (double sign : {1.0, -1.0}) {
        const double t2 = t + sign * probe_radius;
        if (t2 < 0.0) continue;
        const double ratio = distance(flow.evaluate(t2, x), base) / probe_radius;
        if (ratio > rep.max_time_ratio) {
          rep.max_time_ratio = ratio;
          std::ostringstream os;
          os << format_point(x) << " t=" << t;
          rep.time_witness = os.str();
        }
      }
    }
  }
  return rep;
}

}  // namespace koop
