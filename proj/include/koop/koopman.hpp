#pragma once

/**
 * @file koopman.hpp
 * @brief The Koopman lift T(t) f = f . phi_t of a semiflow, finite-difference
 *        generator estimates, the Laplace-transform resolvent, and the adjoint
 *        action on atomic measures.
 *
 * The generator domain is not finitely representable: callers assert
 * smoothness of an observable along orbits, and every estimate carries an
 * explicit error_estimate as the honesty mechanism.
 */

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "koop/geometry.hpp"
#include "koop/observable.hpp"
#include "koop/report.hpp"
#include "koop/semiflow.hpp"

namespace koop {

/// The composition operator x -> f(phi_t(x)); the bound is inherited from f.
inline Observable koopman_apply(const Semiflow& flow, double t, const Observable& f) {
  if (t < 0.0) throw std::invalid_argument("koopman_apply: t must be nonnegative");
  std::ostringstream os;
  os << "T(" << t << ")" << f.label;
  return {[flow, t, fe = f.eval](const StatePoint& x) { return fe(flow.evaluate(t, x)); },
          f.bound, os.str()};
}

struct KoopmanOperator {
  Semiflow flow;
  double t = 0.0;

  Observable apply(const Observable& f) const { return koopman_apply(flow, t, f); }
};

/// Residual of T(s)T(t)f = T(s+t)f on a grid.
inline ResidualReport semigroup_property_check(const Semiflow& flow, const Observable& f,
                                               double s, double t, const CompactSample& grid,
                                               double tol) {
  if (grid.empty()) throw std::invalid_argument("semigroup_property_check: empty grid");
  ResidualReport report;
  report.suite = "semigroup_property_check";
  report.provenance = flow.label;
  const Observable lhs = koopman_apply(flow, s, koopman_apply(flow, t, f));
  const Observable rhs = koopman_apply(flow, s + t, f);
  double worst = 0.0;
  std::string witness;
  for (const auto& x : grid.points) {
    const double r = std::abs(lhs(x) - rhs(x));
    if (r >= worst) {
      worst = r;
      witness = format_point(x);
    }
  }
  ResidualEntry e;
  e.name = "koopman-semigroup-law";
  e.witness_f = f.label;
  e.point = witness;
  e.value = worst;
  e.residual = worst;
  e.tol = tol;
  e.pass = worst < tol;
  report.add(std::move(e));
  return report;
}

/// One finite-difference generator sample with its Richardson error estimate.
struct GeneratorEstimate {
  Complex value{0.0, 0.0};
  double h = 0.0;
  int order = 2;
  double error_estimate = 0.0;
};

/**
 * Forward difference (f(phi_h(x)) - f(x))/h refined by one Richardson step
 * (levels h and h/2, order 2). error_estimate is the difference of the two
 * levels, a conservative bound for the refined value on smooth data.
 */
inline GeneratorEstimate generator_fd(const Semiflow& flow, const Observable& f,
                                      const StatePoint& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("generator_fd: h must be positive");
  const Complex f0 = f(x);
  const Complex level1 = (f(flow.evaluate(h, x)) - f0) / h;
  const Complex level2 = (f(flow.evaluate(0.5 * h, x)) - f0) / (0.5 * h);
  GeneratorEstimate est;
  est.value = 2.0 * level2 - level1;
  est.h = h;
  est.order = 2;
  est.error_estimate = std::abs(level2 - level1);
  return est;
}

/// Gridwise generator: an observable evaluating the estimate anywhere, plus
/// the per-grid-point values and the worst error estimate seen on the grid.
struct GridGenerator {
  Observable derivative;
  std::vector<Complex> values;
  double max_error_estimate = 0.0;
};

inline GridGenerator generator_on_grid(const Semiflow& flow, const Observable& f,
                                       const CompactSample& grid, double h) {
  if (grid.empty()) throw std::invalid_argument("generator_on_grid: empty grid");
  GridGenerator out;
  double bound_sample = 0.0;
  for (const auto& x : grid.points) {
    const auto est = generator_fd(flow, f, x, h);
    out.values.push_back(est.value);
    out.max_error_estimate = std::max(out.max_error_estimate, est.error_estimate);
    bound_sample = std::max(bound_sample, std::abs(est.value));
  }
  out.derivative = {[flow, f, h](const StatePoint& x) { return generator_fd(flow, f, x, h).value; },
                    bound_sample, "gen(" + f.label + ")"};
  return out;
}

/// Laplace-transform resolvent (nu Id - delta)^{-1} f via truncated quadrature.
struct ResolventResult {
  Observable observable;
  double nu = 0.0;
  double T_max = 0.0;
  double quad_error = 0.0;        // measured at probe points, n vs 2n panels
  double truncation_error = 0.0;  // bound * exp(-nu T_max) / nu
};

namespace detail {

/// Composite Simpson over [0, T] with `panels` panels (2*panels+1 nodes).
inline Complex laplace_simpson(const Semiflow& flow, const Observable& f, double nu, double T,
                               std::size_t panels, const StatePoint& x) {
  const std::size_t n = 2 * panels;
  const double h = T / static_cast<double>(n);
  auto integrand = [&](double t) { return std::exp(-nu * t) * f(flow.evaluate(t, x)); };
  Complex s = integrand(0.0) + integrand(T);
  for (std::size_t i = 1; i < n; i += 2) s += 4.0 * integrand(h * static_cast<double>(i));
  for (std::size_t i = 2; i < n; i += 2) s += 2.0 * integrand(h * static_cast<double>(i));
  return s * (h / 3.0);
}

/// Default probe for quadrature-error estimation: one interior chart point.
inline CompactSample default_probe(const DomainChart& chart) {
  StatePoint p;
  p.coords.reserve(chart.dimension());
  for (const auto& ax : chart.bounds) {
    if (std::isfinite(ax.lo) && std::isfinite(ax.hi)) {
      p.coords.push_back(0.5 * (ax.lo + ax.hi));
    } else if (std::isfinite(ax.lo)) {
      p.coords.push_back(ax.lo + 1.0);
    } else if (std::isfinite(ax.hi)) {
      p.coords.push_back(ax.hi - 1.0);
    } else {
      p.coords.push_back(0.0);
    }
  }
  return sample_from_points({std::move(p)});
}

}  // namespace detail

/**
 * (nu Id - delta)^{-1} f as the truncated Laplace transform of the Koopman
 * orbit of f: composite Simpson with n_quad panels on [0, T_max], evaluated
 * lazily per point. The truncation error bound is bound * e^{-nu T_max} / nu;
 * the quadrature error is measured at the probe points by comparing n_quad
 * with 2 n_quad panels.
 */
inline ResolventResult resolvent_laplace(const Semiflow& flow, const Observable& f, double nu,
                                         double T_max, std::size_t n_quad,
                                         const CompactSample& probe) {
  if (nu <= 0.0) throw std::invalid_argument("resolvent_laplace: nu must be positive");
  if (T_max <= 0.0) throw std::invalid_argument("resolvent_laplace: T_max must be positive");
  if (n_quad == 0) throw std::invalid_argument("resolvent_laplace: n_quad must be positive");
  ResolventResult res;
  res.nu = nu;
  res.T_max = T_max;
  res.truncation_error = f.bound * std::exp(-nu * T_max) / nu;
  for (const auto& x : probe.points) {
    const Complex coarse = detail::laplace_simpson(flow, f, nu, T_max, n_quad, x);
    const Complex fine = detail::laplace_simpson(flow, f, nu, T_max, 2 * n_quad, x);
    // |coarse - fine| is 15/16 of the coarse rule's leading error term.
    res.quad_error = std::max(res.quad_error, std::abs(fine - coarse) * (16.0 / 15.0));
  }
  std::ostringstream os;
  os << "R(" << nu << ")" << f.label;
  res.observable = {[flow, f, nu, T_max, n_quad](const StatePoint& x) {
                      return detail::laplace_simpson(flow, f, nu, T_max, n_quad, x);
                    },
                    f.bound / nu, os.str()};
  return res;
}

inline ResolventResult resolvent_laplace(const Semiflow& flow, const Observable& f, double nu,
                                         double T_max, std::size_t n_quad) {
  return resolvent_laplace(flow, f, nu, T_max, n_quad, detail::default_probe(flow.chart));
}

/**
 * Residual of the resolvent identity nu u - delta u = f with
 * u = resolvent_laplace(f, nu), the generator estimated by finite differences.
 */
inline ResidualReport check_resolvent_identity(const Semiflow& flow, const Observable& f,
                                               double nu, double T_max, std::size_t n_quad,
                                               const CompactSample& grid, double h, double tol) {
  if (grid.empty()) throw std::invalid_argument("check_resolvent_identity: empty grid");
  ResidualReport report;
  report.suite = "check_resolvent_identity";
  report.provenance = flow.label;
  const ResolventResult res = resolvent_laplace(flow, f, nu, T_max, n_quad, grid);
  double worst = 0.0;
  std::string witness;
  double worst_fd = 0.0;
  for (const auto& x : grid.points) {
    const Complex u = res.observable(x);
    const auto du = generator_fd(flow, res.observable, x, h);
    const double r = std::abs(nu * u - du.value - f(x));
    worst_fd = std::max(worst_fd, du.error_estimate);
    if (r >= worst) {
      worst = r;
      witness = format_point(x);
    }
  }
  ResidualEntry e;
  e.name = "resolvent-identity";
  e.witness_f = f.label;
  e.point = witness;
  e.value = worst;
  e.residual = worst;
  e.tol = tol;
  e.pass = worst < tol;
  report.add(std::move(e));
  std::ostringstream note;
  note << "error budget: quad " << res.quad_error << ", truncation " << res.truncation_error
       << ", fd " << worst_fd;
  report.warnings.push_back(note.str());
  return report;
}

/// Adjoint action on atomic measures: pushforward of every atom along the flow.
inline AtomicMeasure adjoint_apply(const Semiflow& flow, double t, const AtomicMeasure& mu) {
  if (t < 0.0) throw std::invalid_argument("adjoint_apply: t must be nonnegative");
  AtomicMeasure out;
  out.label = "T'(" + std::to_string(t) + ")" + mu.label;
  out.atoms.reserve(mu.atoms.size());
  for (const auto& a : mu.atoms) out.atoms.push_back({flow.evaluate(t, a.point), a.weight});
  return out;
}

/// <f, delta' mu>: forward difference of t -> <f, T(t)' mu> at 0, one
/// Richardson step, same scheme and error estimate as generator_fd.
inline GeneratorEstimate adjoint_generator_pair(const Semiflow& flow, const Observable& f,
                                                const AtomicMeasure& mu, double h) {
  if (h <= 0.0) throw std::invalid_argument("adjoint_generator_pair: h must be positive");
  const Complex p0 = pair(f, mu);
  const Complex level1 = (pair(f, adjoint_apply(flow, h, mu)) - p0) / h;
  const Complex level2 = (pair(f, adjoint_apply(flow, 0.5 * h, mu)) - p0) / (0.5 * h);
  GeneratorEstimate est;
  est.value = 2.0 * level2 - level1;
  est.h = h;
  est.order = 2;
  est.error_estimate = std::abs(level2 - level1);
  return est;
}

/**
 * Finite-sample version of ker(delta) = intersection of ker(Id - T(t)):
 * both implications are checked on a grid and a time list, and the two
 * "is f fixed" verdicts must agree.
 */
inline ResidualReport kernel_fixed_check(const Semiflow& flow, const Observable& f,
                                         const std::vector<double>& times,
                                         const CompactSample& grid, double h, double tol) {
  if (grid.empty()) throw std::invalid_argument("kernel_fixed_check: empty grid");
  ResidualReport report;
  report.suite = "kernel_fixed_check";
  report.provenance = flow.label;

  double gen_max = 0.0;
  for (const auto& x : grid.points) {
    gen_max = std::max(gen_max, std::abs(generator_fd(flow, f, x, h).value));
  }
  double koop_max = 0.0;
  double t_max = 0.0;
  for (double t : times) {
    t_max = std::max(t_max, t);
    const Observable tf = koopman_apply(flow, t, f);
    for (const auto& x : grid.points) koop_max = std::max(koop_max, std::abs(tf(x) - f(x)));
  }

  const bool fixed_by_generator = gen_max < tol;
  const bool fixed_by_koopman = koop_max < tol;
  const double implied_tol = tol * (1.0 + t_max);

  ResidualEntry gen_entry;
  gen_entry.name = "generator-max";
  gen_entry.witness_f = f.label;
  gen_entry.value = gen_max;
  gen_entry.residual = gen_max;
  gen_entry.tol = tol;
  gen_entry.pass = true;  // informational
  report.add(std::move(gen_entry));

  ResidualEntry koop_entry;
  koop_entry.name = "koopman-defect-max";
  koop_entry.witness_f = f.label;
  koop_entry.value = koop_max;
  koop_entry.residual = koop_max;
  koop_entry.tol = tol;
  koop_entry.pass = true;  // informational
  report.add(std::move(koop_entry));

  ResidualEntry fwd;
  fwd.name = "kernel-implies-fixed";
  fwd.value = koop_max;
  fwd.residual = fixed_by_generator ? koop_max : 0.0;
  fwd.tol = implied_tol;
  fwd.pass = !fixed_by_generator || koop_max < implied_tol;
  report.add(std::move(fwd));

  ResidualEntry bwd;
  bwd.name = "fixed-implies-kernel";
  bwd.value = gen_max;
  bwd.residual = fixed_by_koopman ? gen_max : 0.0;
  bwd.tol = implied_tol;
  bwd.pass = !fixed_by_koopman || gen_max < implied_tol;
  report.add(std::move(bwd));

  ResidualEntry consistent;
  consistent.name = "verdicts-consistent";
  consistent.value = fixed_by_generator == fixed_by_koopman ? 1.0 : 0.0;
  consistent.residual = fixed_by_generator == fixed_by_koopman ? 0.0 : 1.0;
  consistent.tol = 0.5;
  consistent.pass = fixed_by_generator == fixed_by_koopman;
  report.add(std::move(consistent));

  std::ostringstream note;
  note << "fixed-by-generator=" << (fixed_by_generator ? "yes" : "no")
       << " fixed-by-koopman=" << (fixed_by_koopman ? "yes" : "no");
  report.warnings.push_back(note.str());
  if (times.empty()) report.warnings.push_back("empty time list: koopman side is vacuous");
  return report;
}

/**
 * Sampled form of the equicontinuity inequality p_K(T(t) f) <= p_L(f) with
 * L the forward image of the sample; on samples the two maxima agree exactly.
 * Diagnostic only: a rigorous check would need true images of compacta.
 */
inline ResidualReport image_seminorm_check(const Semiflow& flow, const Observable& f, double t,
                                           const CompactSample& K) {
  ResidualReport report;
  report.suite = "image_seminorm_check";
  report.provenance = flow.label;
  report.assumptions.push_back("image sample stands in for the true compact image");
  CompactSample image;
  image.mesh = K.mesh;
  image.points.reserve(K.size());
  for (const auto& x : K.points) image.points.push_back(flow.evaluate(t, x));
  const double lhs = seminorm_K(koopman_apply(flow, t, f), K);
  const double rhs = seminorm_K(f, image);
  ResidualEntry e;
  e.name = "pK(Tf)<=pL(f)";
  e.witness_f = f.label;
  e.value = lhs;
  e.residual = std::max(0.0, lhs - rhs);
  e.tol = 1e-12 * (1.0 + f.bound);
  e.pass = e.residual < e.tol;
  report.add(std::move(e));
  return report;
}

}  // namespace koop
