#pragma once

/**
 * @file observable.hpp
 * @brief Bounded continuous observables with their algebra and lattice
 *        operations, strict-topology seminorms on finite samples, and finite
 *        atomic measures for dual pairings.
 *
 * Compact sets enter only as finite samples with a declared mesh, so every
 * "sup over K" below is a finite max; the gap to the true supremum is
 * controlled by the mesh and the moduli of continuity of the functions
 * involved, and is documented rather than bounded rigorously.
 */

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "koop/errors.hpp"
#include "koop/geometry.hpp"
#include "koop/report.hpp"

namespace koop {

using Complex = std::complex<double>;

/// A bounded continuous complex observable with a claimed sup-norm bound.
struct Observable {
  std::function<Complex(const StatePoint&)> eval;
  double bound = 0.0;
  std::string label;

  Complex operator()(const StatePoint& x) const { return eval(x); }
};

inline Observable unit_observable() {
  return {[](const StatePoint&) { return Complex{1.0, 0.0}; }, 1.0, "1"};
}

inline Observable constant_observable(Complex c) {
  std::ostringstream os;
  os << "const(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  return {[c](const StatePoint&) { return c; }, std::abs(c), os.str()};
}

/// Pointwise product; the bound composes submultiplicatively.
inline Observable alg_product(const Observable& f, const Observable& g) {
  return {[fe = f.eval, ge = g.eval](const StatePoint& x) { return fe(x) * ge(x); },
          f.bound * g.bound, "(" + f.label + "*" + g.label + ")"};
}

/// Pointwise modulus |f|; the bound is preserved.
inline Observable modulus(const Observable& f) {
  return {[fe = f.eval](const StatePoint& x) { return Complex{std::abs(fe(x)), 0.0}; },
          f.bound, "|" + f.label + "|"};
}

inline Observable add(const Observable& f, const Observable& g) {
  return {[fe = f.eval, ge = g.eval](const StatePoint& x) { return fe(x) + ge(x); },
          f.bound + g.bound, "(" + f.label + "+" + g.label + ")"};
}

inline Observable sub(const Observable& f, const Observable& g) {
  return {[fe = f.eval, ge = g.eval](const StatePoint& x) { return fe(x) - ge(x); },
          f.bound + g.bound, "(" + f.label + "-" + g.label + ")"};
}

inline Observable scale(Complex c, const Observable& f) {
  return {[c, fe = f.eval](const StatePoint& x) { return c * fe(x); },
          std::abs(c) * f.bound, "scaled(" + f.label + ")"};
}

inline Observable conjugate(const Observable& f) {
  return {[fe = f.eval](const StatePoint& x) { return std::conj(fe(x)); },
          f.bound, "conj(" + f.label + ")"};
}

// Built-in observable families, referenced by name in scenario configs.

/// exp(-a ||x||), bound 1.
inline Observable exp_decay_observable(double a = 1.0) {
  std::ostringstream os;
  os << "exp(-" << a << "||x||)";
  return {[a](const StatePoint& x) { return Complex{std::exp(-a * norm(x)), 0.0}; }, 1.0, os.str()};
}

/// exp(-a ||x - c||^2), bound 1.
inline Observable gaussian_observable(double a, StatePoint center) {
  std::ostringstream os;
  os << "gauss(a=" << a << ",c=" << format_point(center) << ")";
  return {[a, center = std::move(center)](const StatePoint& x) {
            const double d = distance(x, center);
            return Complex{std::exp(-a * d * d), 0.0};
          },
          1.0, os.str()};
}

/// Coordinate x_axis clipped into [lo, hi]; bound max(|lo|, |hi|).
inline Observable coordinate_observable(std::size_t axis, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("coordinate_observable: lo > hi");
  std::ostringstream os;
  os << "coord" << axis << "[" << lo << "," << hi << "]";
  return {[axis, lo, hi](const StatePoint& x) {
            return Complex{std::min(std::max(x[axis], lo), hi), 0.0};
          },
          std::max(std::abs(lo), std::abs(hi)), os.str()};
}

/// Tent bump max(0, 1 - s ||x - c||), bound 1.
inline Observable bump_observable(StatePoint center, double sharpness) {
  std::ostringstream os;
  os << "bump(c=" << format_point(center) << ",s=" << sharpness << ")";
  return {[center = std::move(center), sharpness](const StatePoint& x) {
            return Complex{std::max(0.0, 1.0 - sharpness * distance(x, center)), 0.0};
          },
          1.0, os.str()};
}

/// sin(x_axis), bound 1.
inline Observable sin_observable(std::size_t axis = 0) {
  return {[axis](const StatePoint& x) { return Complex{std::sin(x[axis]), 0.0}; }, 1.0, "sin"};
}

/// exp(i omega x_axis), bound 1 (unimodular).
inline Observable complex_exponential_observable(double omega = 1.0, std::size_t axis = 0) {
  std::ostringstream os;
  os << "exp(" << omega << "ix)";
  return {[omega, axis](const StatePoint& x) {
            return std::exp(Complex{0.0, omega * x[axis]});
          },
          1.0, os.str()};
}

/// Euclidean radius ||x|| clipped at `cap`.
inline Observable radius_observable(double cap) {
  std::ostringstream os;
  os << "radius[<=" << cap << "]";
  return {[cap](const StatePoint& x) { return Complex{std::min(norm(x), cap), 0.0}; }, cap, os.str()};
}

/// Squared distance ||x - c||^2 clipped at `cap`; vanishes exactly at c.
inline Observable sqdist_observable(StatePoint center, double cap) {
  std::ostringstream os;
  os << "sqdist(c=" << format_point(center) << ")[<=" << cap << "]";
  return {[center = std::move(center), cap](const StatePoint& x) {
            const double d = distance(x, center);
            return Complex{std::min(d * d, cap), 0.0};
          },
          cap, os.str()};
}

/// Spot-check of the claimed bound on a sample grid.
inline ResidualReport check_bound(const Observable& f, const CompactSample& grid) {
  ResidualReport report;
  report.suite = "check_bound";
  report.provenance = f.label;
  double worst = 0.0;
  std::string witness;
  for (const auto& x : grid.points) {
    const double v = std::abs(f(x));
    if (v > worst) {
      worst = v;
      witness = format_point(x);
    }
  }
  ResidualEntry e;
  e.name = "sup-bound";
  e.point = witness;
  e.value = worst;
  e.residual = std::max(0.0, worst - f.bound);
  e.tol = 1e-12 * (1.0 + f.bound);
  e.pass = worst <= f.bound * (1.0 + 1e-12);
  report.add(std::move(e));
  return report;
}

/// p_K(f) = max over the sample points of |f|.
inline double seminorm_K(const Observable& f, const CompactSample& K) {
  if (K.empty()) throw std::invalid_argument("seminorm_K: empty compact sample");
  double m = 0.0;
  for (const auto& x : K.points) m = std::max(m, std::abs(f(x)));
  return m;
}

/**
 * A nonnegative bounded weight vanishing at infinity, with decay witnesses:
 * for each listed eps, a compact sample outside of which the weight is
 * claimed to stay below eps (spot-checked on exterior probe points).
 */
struct VanishingWeight {
  std::function<double(const StatePoint&)> eval;
  std::vector<std::pair<double, CompactSample>> decay_witnesses;
  std::string label;

  double operator()(const StatePoint& x) const { return eval(x); }
};

/// Probes outside a witness sample (farther than its mesh) must obey the eps bound.
inline ResidualReport check_decay_witness(const VanishingWeight& g,
                                          const std::vector<StatePoint>& probes) {
  ResidualReport report;
  report.suite = "check_decay_witness";
  report.provenance = g.label;
  for (std::size_t wi = 0; wi < g.decay_witnesses.size(); ++wi) {
    const auto& [eps, K] = g.decay_witnesses[wi];
    double worst = 0.0;
    std::string witness;
    for (const auto& p : probes) {
      if (distance_to(p, K) <= K.mesh) continue;  // inside the witness set
      const double v = g(p);
      if (v > worst) {
        worst = v;
        witness = format_point(p);
      }
    }
    ResidualEntry e;
    e.name = "decay(eps=" + std::to_string(eps) + ")";
    e.point = witness;
    e.value = worst;
    e.residual = std::max(0.0, worst - eps);
    e.tol = 1e-12;
    e.pass = worst <= eps + 1e-12;
    report.add(std::move(e));
  }
  return report;
}

/**
 * Sampled strict-topology seminorm p_g(f) = ||f g||_inf: the finite max of
 * |f| g over the grid, a lower bound of the true seminorm with gap controlled
 * by the grid mesh.
 */
inline double strict_seminorm(const Observable& f, const VanishingWeight& g,
                              const CompactSample& grid) {
  if (grid.empty()) throw std::invalid_argument("strict_seminorm: empty grid");
  double m = 0.0;
  for (const auto& x : grid.points) m = std::max(m, std::abs(f(x)) * g(x));
  return m;
}

/// Finite weighted point masses; the only representable elements of the dual.
struct AtomicMeasure {
  struct Atom {
    StatePoint point;
    Complex weight;
  };
  std::vector<Atom> atoms;
  std::string label;

  double total_variation() const {
    double s = 0.0;
    for (const auto& a : atoms) s += std::abs(a.weight);
    return s;
  }
};

inline AtomicMeasure dirac(StatePoint x) {
  AtomicMeasure mu;
  mu.label = "dirac" + format_point(x);
  mu.atoms.push_back({std::move(x), Complex{1.0, 0.0}});
  return mu;
}

/// Dual pairing <f, mu> = sum of weights times point evaluations.
inline Complex pair(const Observable& f, const AtomicMeasure& mu) {
  Complex s{0.0, 0.0};
  for (const auto& a : mu.atoms) s += a.weight * f(a.point);
  return s;
}

/// A finite test-function family containing the unit, closed under requested
/// products and moduli up to a depth bound.
struct Dictionary {
  std::vector<Observable> members;
};

inline Dictionary make_dictionary(const std::vector<Observable>& seeds, int product_depth = 1,
                                  bool include_moduli = false) {
  Dictionary dict;
  dict.members.push_back(unit_observable());
  auto seen = [&dict](const std::string& label) {
    for (const auto& m : dict.members) {
      if (m.label == label) return true;
    }
    return false;
  };
  for (const auto& f : seeds) {
    if (!seen(f.label)) dict.members.push_back(f);
  }
  std::size_t layer_begin = 1;  // skip the unit when forming products
  for (int depth = 0; depth < product_depth; ++depth) {
    const std::size_t layer_end = dict.members.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (std::size_t j = i; j < layer_end; ++j) {
        Observable p = alg_product(dict.members[i], dict.members[j]);
        if (!seen(p.label)) dict.members.push_back(std::move(p));
      }
    }
    layer_begin = layer_end;
  }
  if (include_moduli) {
    const std::size_t end = dict.members.size();
    for (std::size_t i = 1; i < end; ++i) {
      Observable m = modulus(dict.members[i]);
      if (!seen(m.label)) dict.members.push_back(std::move(m));
    }
  }
  return dict;
}

/**
 * Sequential mixed-topology convergence criterion on finite data: a sequence
 * converges iff it is uniformly norm bounded and p_K-converges on every
 * compact sample. `schedule[n]` is the tolerance the n-th residual must
 * eventually stay below.
 */
struct MixedConvergenceReport {
  bool bound_ok = true;
  std::vector<std::string> bound_violations;
  struct PerCompact {
    std::vector<double> residuals;
    bool converged = false;
  };
  std::vector<PerCompact> per_compact;
  bool pass = false;
};

inline MixedConvergenceReport mixed_convergence_check(const std::vector<Observable>& seq,
                                                      const Observable& limit,
                                                      const std::vector<CompactSample>& Ks,
                                                      double bound,
                                                      const std::vector<double>& schedule) {
  if (schedule.size() != seq.size()) {
    throw std::invalid_argument("mixed_convergence_check: schedule size must match sequence size");
  }
  MixedConvergenceReport rep;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    bool violated = seq[n].bound > bound * (1.0 + 1e-12);
    for (const auto& K : Ks) {
      if (seminorm_K(seq[n], K) > bound * (1.0 + 1e-12)) violated = true;
    }
    if (violated) {
      rep.bound_ok = false;
      rep.bound_violations.push_back(seq[n].label);
    }
  }
  for (const auto& K : Ks) {
    MixedConvergenceReport::PerCompact pk;
    for (const auto& fn : seq) pk.residuals.push_back(seminorm_K(sub(fn, limit), K));
    // "eventually below the schedule": from the first index meeting it onward.
    std::size_t settle = pk.residuals.size();
    for (std::size_t n = 0; n < pk.residuals.size(); ++n) {
      if (pk.residuals[n] <= schedule[n]) {
        settle = n;
        break;
      }
    }
    pk.converged = settle < pk.residuals.size();
    for (std::size_t n = settle; n < pk.residuals.size(); ++n) {
      if (pk.residuals[n] > schedule[n]) pk.converged = false;
    }
    rep.per_compact.push_back(std::move(pk));
  }
  rep.pass = rep.bound_ok;
  for (const auto& pk : rep.per_compact) rep.pass = rep.pass && pk.converged;
  return rep;
}

}  // namespace koop
