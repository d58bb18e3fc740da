#pragma once

/**
 * @file attractor.hpp
 * @brief Attractor detection through the ideal correspondence: closed sets
 *        versus ideals of vanishing observables, invariance on both sides,
 *        attractivity as uniform Koopman decay on ideal functions, absorbing
 *        times, and smallest-attractor approximation by forward iteration.
 *
 * The existence proof behind the smallest attractor is nonconstructive; here
 * the set is approximated by iterating the absorbing cloud forward and then
 * validated against the ideal-decay characterization, which is where the
 * actual content lives.
 */

#include <cmath>
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

/// A finite family of sampled sets standing in for the attraction family.
struct SetFamily {
  std::vector<CompactSample> members;
  std::string label;

  bool union_nonempty() const {
    for (const auto& m : members) {
      if (!m.empty()) return true;
    }
    return false;
  }
};

/// Finitely many observables vanishing on a sampled closed set M.
struct IdealBasis {
  CompactSample zero_set;
  std::vector<Observable> functions;
  double vanish_tol = 1e-12;
  bool degenerate = false;  // no probe point where the basis is bounded away from 0
};

namespace detail {

inline std::vector<AxisBounds> bounded_window(const DomainChart& chart, double span) {
  std::vector<AxisBounds> box;
  box.reserve(chart.dimension());
  for (const auto& ax : chart.bounds) {
    const double lo = std::isfinite(ax.lo) ? ax.lo : (std::isfinite(ax.hi) ? ax.hi - span : -span);
    const double hi = std::isfinite(ax.hi) ? std::min(ax.hi, lo + span) : lo + span;
    box.push_back({lo, hi});
  }
  return box;
}

}  // namespace detail

/**
 * Constructs `count` bounded continuous functions vanishing on M: the base
 * distance ramp min(1, sharpness * dist(x, M)) and its products with Gaussian
 * bumps spread over the chart, so that exterior sample points are separated.
 * The basis is flagged degenerate when no probe point of the chart window
 * reaches value 1/2 (e.g. when M fills the chart).
 */
inline IdealBasis ideal_basis(const CompactSample& M, const DomainChart& chart, std::size_t count,
                              double sharpness, double vanish_tol = 1e-12) {
  if (M.empty()) throw std::invalid_argument("ideal_basis: M must be nonempty");
  if (count == 0) throw std::invalid_argument("ideal_basis: count must be positive");
  if (sharpness <= 0.0) throw std::invalid_argument("ideal_basis: sharpness must be positive");
  IdealBasis basis;
  basis.zero_set = M;
  basis.vanish_tol = vanish_tol;

  const CompactSample zero_set = M;
  Observable ramp{[zero_set, sharpness](const StatePoint& x) {
                    return Complex{std::min(1.0, sharpness * distance_to(x, zero_set)), 0.0};
                  },
                  1.0, "dist-ramp"};
  basis.functions.push_back(ramp);

  const auto window = detail::bounded_window(chart, 10.0);
  if (count > 1) {
    const CompactSample centers = grid_sample(window, count - 1);
    for (std::size_t i = 0; i + 1 < count && i < centers.size(); ++i) {
      Observable bump = gaussian_observable(1.0, centers.points[i]);
      Observable f = alg_product(ramp, bump);
      f.label = "ramp*" + bump.label;
      basis.functions.push_back(std::move(f));
    }
  }

  const CompactSample probes = grid_sample(window, 9);
  double best = 0.0;
  for (const auto& p : probes.points) best = std::max(best, std::abs(ramp(p)));
  basis.degenerate = best < 0.5;
  return basis;
}

/// Spot-check that every basis function vanishes on the zero set.
inline ResidualReport check_ideal_basis_vanishes(const IdealBasis& basis) {
  ResidualReport report;
  report.suite = "check_ideal_basis_vanishes";
  for (const auto& f : basis.functions) {
    double worst = 0.0;
    for (const auto& x : basis.zero_set.points) worst = std::max(worst, std::abs(f(x)));
    ResidualEntry e;
    e.name = "vanishes-on-M";
    e.witness_f = f.label;
    e.value = worst;
    e.residual = worst;
    e.tol = basis.vanish_tol;
    e.pass = worst <= basis.vanish_tol;
    report.add(std::move(e));
  }
  return report;
}

/// phi_t(M) stays within tol + mesh of the sample of M, for every listed t.
inline ResidualReport check_invariance(const Semiflow& flow, const CompactSample& M,
                                       const std::vector<double>& times, double tol) {
  if (M.empty()) throw std::invalid_argument("check_invariance: empty set sample");
  ResidualReport report;
  report.suite = "check_invariance";
  report.provenance = flow.label;
  double worst = 0.0;
  std::string witness;
  for (double t : times) {
    for (const auto& x : M.points) {
      const double d = distance_to(flow.evaluate(t, x), M);
      if (d >= worst) {
        worst = d;
        std::ostringstream os;
        os << format_point(x) << " t=" << t;
        witness = os.str();
      }
    }
  }
  ResidualEntry e;
  e.name = "set-invariance";
  e.point = witness;
  e.value = worst;
  e.residual = worst;
  e.tol = tol + M.mesh;
  e.pass = worst < tol + M.mesh;
  report.add(std::move(e));
  if (times.empty()) report.warnings.push_back("empty time list: vacuous pass");
  return report;
}

/// T(t) I_M stays inside I_M: |f(phi_t(x))| small on M for basis functions f.
inline ResidualReport check_ideal_invariance(const Semiflow& flow, const IdealBasis& basis,
                                             const std::vector<double>& times, double tol) {
  ResidualReport report;
  report.suite = "check_ideal_invariance";
  report.provenance = flow.label;
  double worst = 0.0;
  std::string witness_f, witness_pt;
  for (const auto& f : basis.functions) {
    for (double t : times) {
      const Observable tf = koopman_apply(flow, t, f);
      for (const auto& x : basis.zero_set.points) {
        const double v = std::abs(tf(x));
        if (v >= worst) {
          worst = v;
          witness_f = f.label;
          std::ostringstream os;
          os << format_point(x) << " t=" << t;
          witness_pt = os.str();
        }
      }
    }
  }
  ResidualEntry e;
  e.name = "ideal-invariance";
  e.witness_f = witness_f;
  e.point = witness_pt;
  e.value = worst;
  e.residual = worst;
  e.tol = tol;
  e.pass = worst < tol;
  report.add(std::move(e));
  if (times.empty()) report.warnings.push_back("empty time list: vacuous pass");
  return report;
}

/// One uniform-decay curve t -> max over a set sample of |f(phi_t(x))|.
struct DecayCurve {
  std::string set_label;
  std::string fn_label;
  std::vector<double> times;
  std::vector<double> values;
};

struct AttractiveReport {
  ResidualReport report;
  std::vector<DecayCurve> curves;
};

namespace detail {

inline DecayCurve decay_curve(const Semiflow& flow, const Observable& f, const CompactSample& B,
                              const std::string& set_label, const std::vector<double>& t_grid) {
  DecayCurve curve;
  curve.set_label = set_label;
  curve.fn_label = f.label;
  for (double t : t_grid) {
    const Observable tf = koopman_apply(flow, t, f);
    double worst = 0.0;
    for (const auto& x : B.points) worst = std::max(worst, std::abs(tf(x)));
    curve.times.push_back(t);
    curve.values.push_back(worst);
  }
  return curve;
}

inline void spotcheck_family_forward_covered(const Semiflow& flow, const SetFamily& family,
                                             const std::vector<double>& t_grid,
                                             ResidualReport& report) {
  const double slack = 1e-6 + flow.accuracy;
  for (std::size_t bi = 0; bi < family.members.size(); ++bi) {
    for (double t : t_grid) {
      bool covered = false;
      for (const auto& C : family.members) {
        bool all_inside = true;
        for (const auto& x : family.members[bi].points) {
          if (distance_to(flow.evaluate(t, x), C) > C.mesh + slack) {
            all_inside = false;
            break;
          }
        }
        if (all_inside) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        std::ostringstream os;
        os << "family hypothesis: image of member " << bi << " at t=" << t
           << " not covered by any member";
        report.warnings.push_back(os.str());
        return;
      }
    }
  }
}

}  // namespace detail

/**
 * M is family-attractive iff every basis function of I_M decays to zero
 * uniformly on each member: pass iff the final decay value is below
 * decay_tol for every (member, basis function) pair.
 */
inline AttractiveReport check_attractive(const Semiflow& flow, const CompactSample& M,
                                         const SetFamily& family, const IdealBasis& basis,
                                         const std::vector<double>& t_grid, double decay_tol) {
  if (!family.union_nonempty()) throw std::invalid_argument("check_attractive: family union is empty");
  if (t_grid.empty()) throw std::invalid_argument("check_attractive: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] <= t_grid[i - 1]) throw std::invalid_argument("check_attractive: t_grid must increase");
  }
  for (const auto& f : basis.functions) {
    for (const auto& x : M.points) {
      if (std::abs(f(x)) > basis.vanish_tol + 1e-9) {
        throw std::invalid_argument("check_attractive: basis function '" + f.label +
                                    "' does not vanish on M at " + format_point(x));
      }
    }
  }
  AttractiveReport out;
  out.report.suite = "check_attractive";
  out.report.provenance = flow.label;
  detail::spotcheck_family_forward_covered(flow, family, t_grid, out.report);
  for (std::size_t bi = 0; bi < family.members.size(); ++bi) {
    const std::string set_label = family.label.empty()
                                      ? "B" + std::to_string(bi)
                                      : family.label + "." + std::to_string(bi);
    for (const auto& f : basis.functions) {
      DecayCurve curve = detail::decay_curve(flow, f, family.members[bi], set_label, t_grid);
      ResidualEntry e;
      e.name = "uniform-decay";
      e.witness_f = f.label;
      e.witness_g = set_label;
      e.value = curve.values.back();
      e.residual = curve.values.back();
      e.tol = decay_tol;
      e.pass = curve.values.back() < decay_tol;
      out.report.add(std::move(e));
      out.curves.push_back(std::move(curve));
    }
  }
  return out;
}

/// Per-member absorbing entry times into A, or failure when a member never enters.
struct AbsorbingReport {
  std::vector<std::optional<double>> entry_times;
  bool all_absorbed = false;
  ResidualReport report;
};

/**
 * Smallest grid time t0 per family member such that for every sampled
 * t >= t0 the whole member maps within tol + mesh of A.
 */
inline AbsorbingReport find_absorbing_time(const Semiflow& flow, const SetFamily& family,
                                           const CompactSample& A, const std::vector<double>& t_grid,
                                           double tol) {
  if (A.empty()) throw std::invalid_argument("find_absorbing_time: empty absorbing sample");
  if (t_grid.empty()) throw std::invalid_argument("find_absorbing_time: empty time grid");
  AbsorbingReport out;
  out.report.suite = "find_absorbing_time";
  out.report.provenance = flow.label;
  out.all_absorbed = true;
  for (std::size_t bi = 0; bi < family.members.size(); ++bi) {
    const auto& B = family.members[bi];
    std::vector<bool> inside(t_grid.size(), true);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      for (const auto& x : B.points) {
        if (distance_to(flow.evaluate(t_grid[ti], x), A) >= tol + A.mesh) {
          inside[ti] = false;
          break;
        }
      }
    }
    std::optional<double> entry;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      bool from_here = true;
      for (std::size_t tj = ti; tj < t_grid.size(); ++tj) from_here = from_here && inside[tj];
      if (from_here) {
        entry = t_grid[ti];
        break;
      }
    }
    ResidualEntry e;
    e.name = "entry-time.B" + std::to_string(bi);
    e.value = entry.value_or(-1.0);
    e.residual = entry ? 0.0 : 1.0;
    e.tol = 0.5;
    e.pass = entry.has_value();
    out.report.add(std::move(e));
    if (!entry) out.all_absorbed = false;
    out.entry_times.push_back(entry);
  }
  return out;
}

/// Forward-iteration approximation of the smallest attractor.
struct AttractorResult {
  CompactSample attractor;
  std::vector<double> hausdorff_history;
  std::vector<std::pair<std::string, double>> absorbed_times;  // filled by the caller
  bool converged = false;
  std::size_t iterations = 0;
};

/**
 * Iterates A_{n+1} = dedup(phi_tau(A_n)) until the symmetric Hausdorff
 * distance between successive clouds drops below hausdorff_tol or max_iter is
 * reached; the deduplication radius is the mesh of A.
 */
inline AttractorResult smallest_attractor(const Semiflow& flow, const CompactSample& A, double tau,
                                          std::size_t max_iter, double hausdorff_tol) {
  if (A.empty()) throw std::invalid_argument("smallest_attractor: empty absorbing sample");
  if (tau <= 0.0) throw std::invalid_argument("smallest_attractor: tau must be positive");
  if (max_iter == 0) throw std::invalid_argument("smallest_attractor: max_iter must be positive");
  AttractorResult result;
  std::vector<StatePoint> cloud = dedup_points(A.points, A.mesh);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::vector<StatePoint> image;
    image.reserve(cloud.size());
    for (const auto& x : cloud) image.push_back(flow.evaluate(tau, x));
    std::vector<StatePoint> next = dedup_points(image, A.mesh);
    const double d = hausdorff_distance(cloud, next);
    result.hausdorff_history.push_back(d);
    cloud = std::move(next);
    result.iterations = iter;
    if (d < hausdorff_tol) {
      result.converged = true;
      break;
    }
  }
  result.attractor.points = std::move(cloud);
  result.attractor.mesh = A.mesh;
  return result;
}

struct IdealDecayCheck {
  ResidualReport report;
  std::vector<DecayCurve> curves;
};

/**
 * Two-sided validation of I_M = { f : T(t) f -> 0 uniformly on the family }:
 * basis functions of M must decay below tol, probe functions not vanishing on
 * M (max |f| on M above 10 tol) must stay at or above tol, and probes that do
 * vanish on M must decay as well.
 */
inline IdealDecayCheck ideal_of_attractor_check(const Semiflow& flow, const AttractorResult& result,
                                                const SetFamily& family, const Dictionary& probe_dict,
                                                const std::vector<double>& t_grid, double tol,
                                                std::size_t basis_count = 3, double sharpness = 2.0) {
  if (!family.union_nonempty()) {
    throw std::invalid_argument("ideal_of_attractor_check: family union is empty");
  }
  if (t_grid.empty()) throw std::invalid_argument("ideal_of_attractor_check: empty time grid");
  IdealDecayCheck out;
  out.report.suite = "ideal_of_attractor_check";
  out.report.provenance = flow.label;
  const IdealBasis basis = ideal_basis(result.attractor, flow.chart, basis_count, sharpness);
  if (basis.degenerate) out.report.warnings.push_back("ideal basis degenerate: M fills the chart window");

  for (std::size_t bi = 0; bi < family.members.size(); ++bi) {
    const std::string set_label = "B" + std::to_string(bi);
    for (const auto& f : basis.functions) {
      DecayCurve curve = detail::decay_curve(flow, f, family.members[bi], set_label, t_grid);
      ResidualEntry e;
      e.name = "basis-decays";
      e.witness_f = f.label;
      e.witness_g = set_label;
      e.value = curve.values.back();
      e.residual = curve.values.back();
      e.tol = tol;
      e.pass = curve.values.back() < tol;
      out.report.add(std::move(e));
      out.curves.push_back(std::move(curve));
    }
    for (const auto& f : probe_dict.members) {
      double on_M = 0.0;
      for (const auto& x : result.attractor.points) on_M = std::max(on_M, std::abs(f(x)));
      const bool vanishes_on_M = on_M <= 10.0 * tol;
      DecayCurve curve = detail::decay_curve(flow, f, family.members[bi], set_label, t_grid);
      const double final_value = curve.values.back();
      ResidualEntry e;
      e.name = vanishes_on_M ? "vanishing-probe-decays" : "nonvanishing-probe-persists";
      e.witness_f = f.label;
      e.witness_g = set_label;
      e.value = final_value;
      e.residual = vanishes_on_M ? final_value : (final_value >= tol ? 0.0 : tol - final_value);
      e.tol = tol;
      e.pass = vanishes_on_M ? final_value < tol : final_value >= tol;
      out.report.add(std::move(e));
      out.curves.push_back(std::move(curve));
    }
  }
  return out;
}

}  // namespace koop
