#pragma once

/**
 * @file geometry.hpp
 * @brief State points, box charts, finite compact samples and point-cloud metrics.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "koop/errors.hpp"

namespace koop {

/// A point of the state space in chart coordinates.
struct StatePoint {
  std::vector<double> coords;

  StatePoint() = default;
  explicit StatePoint(std::vector<double> c) : coords(std::move(c)) {}

  static StatePoint scalar(double x) { return StatePoint{{x}}; }

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  bool finite() const {
    for (double c : coords) {
      if (!std::isfinite(c)) return false;
    }
    return true;
  }
};

inline double norm(const StatePoint& p) {
  double s = 0.0;
  for (double c : p.coords) s += c * c;
  return std::sqrt(s);
}

inline double distance(const StatePoint& a, const StatePoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::string format_point(const StatePoint& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ")";
  return os.str();
}

/// Closed (possibly half-infinite) interval of one chart axis.
struct AxisBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/**
 * A finite-dimensional box chart of the state space. Half-infinite axes are
 * allowed; a chart flagged `compactified` stores the coordinate y = x/(1+x)
 * per axis, so the point at infinity is the chart point y = 1.
 */
struct DomainChart {
  std::vector<AxisBounds> bounds;
  bool compactified = false;

  DomainChart() = default;
  explicit DomainChart(std::vector<AxisBounds> b, bool compact = false)
      : bounds(std::move(b)), compactified(compact) {
    for (const auto& ax : bounds) {
      if (!(ax.lo <= ax.hi)) throw std::invalid_argument("DomainChart: lo > hi on an axis");
    }
  }

  std::size_t dimension() const { return bounds.size(); }

  bool contains(const StatePoint& p, double tol = 0.0) const {
    if (p.dim() != bounds.size()) return false;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (p[i] < bounds[i].lo - tol || p[i] > bounds[i].hi + tol) return false;
    }
    return true;
  }

  /// How far outside the box the point is (0 inside).
  double exit_distance(const StatePoint& p) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (p[i] < bounds[i].lo) worst = std::max(worst, bounds[i].lo - p[i]);
      if (p[i] > bounds[i].hi) worst = std::max(worst, p[i] - bounds[i].hi);
    }
    return worst;
  }

  StatePoint clamp(StatePoint p) const {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      p[i] = std::min(std::max(p[i], bounds[i].lo), bounds[i].hi);
    }
    return p;
  }
};

inline DomainChart half_line_chart() {
  return DomainChart{{AxisBounds{0.0, std::numeric_limits<double>::infinity()}}};
}

inline DomainChart interval_chart(double lo, double hi) {
  return DomainChart{{AxisBounds{lo, hi}}};
}

/// Chart [0,1] in the compactified coordinate y = x/(1+x); y = 1 is infinity.
inline DomainChart compactified_half_line_chart() {
  return DomainChart{{AxisBounds{0.0, 1.0}}, true};
}

/**
 * A finite point cloud standing in for a compact subset of the state space.
 * `mesh` is the claimed covering radius of the cloud within the set it samples.
 */
struct CompactSample {
  std::vector<StatePoint> points;
  double mesh = 0.0;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// n equally spaced points on [lo, hi]; mesh = half the spacing.
inline CompactSample uniform_sample(double lo, double hi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_sample: n must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("uniform_sample: lo > hi");
  CompactSample s;
  s.points.reserve(n);
  if (n == 1) {
    s.points.push_back(StatePoint::scalar(0.5 * (lo + hi)));
    s.mesh = 0.5 * (hi - lo);
    return s;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back(StatePoint::scalar(lo + step * static_cast<double>(i)));
  }
  s.mesh = 0.5 * step;
  return s;
}

/// Tensor grid over a box, n points per axis; mesh = half cell diagonal.
inline CompactSample grid_sample(const std::vector<AxisBounds>& box, std::size_t n_per_axis) {
  if (n_per_axis == 0) throw std::invalid_argument("grid_sample: n_per_axis must be positive");
  for (const auto& ax : box) {
    if (!(ax.lo <= ax.hi)) throw std::invalid_argument("grid_sample: lo > hi on an axis");
  }
  const std::size_t d = box.size();
  std::vector<std::size_t> idx(d, 0);
  CompactSample s;
  double cell2 = 0.0;
  for (const auto& ax : box) {
    const double step = n_per_axis > 1 ? (ax.hi - ax.lo) / static_cast<double>(n_per_axis - 1) : (ax.hi - ax.lo);
    cell2 += 0.25 * step * step;
  }
  s.mesh = std::sqrt(cell2);
  while (true) {
    StatePoint p;
    p.coords.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& ax = box[i];
      p[i] = n_per_axis > 1
                 ? ax.lo + (ax.hi - ax.lo) * static_cast<double>(idx[i]) / static_cast<double>(n_per_axis - 1)
                 : 0.5 * (ax.lo + ax.hi);
    }
    s.points.push_back(std::move(p));
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == n_per_axis) {
      idx[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  return s;
}

inline CompactSample sample_from_points(std::vector<StatePoint> pts, double mesh = 0.0) {
  CompactSample s;
  s.points = std::move(pts);
  s.mesh = mesh;
  return s;
}

inline double distance_to(const StatePoint& p, const CompactSample& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : cloud.points) best = std::min(best, distance(p, q));
  return best;
}

/// Symmetric max-min (Hausdorff) distance between two point clouds.
inline double hausdorff_distance(const std::vector<StatePoint>& a, const std::vector<StatePoint>& b) {
  auto one_sided = [](const std::vector<StatePoint>& from, const std::vector<StatePoint>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

/// Greedy keep-first deduplication: drop points within `radius` of a kept one.
inline std::vector<StatePoint> dedup_points(const std::vector<StatePoint>& pts, double radius) {
  std::vector<StatePoint> kept;
  for (const auto& p : pts) {
    bool close = false;
    for (const auto& q : kept) {
      if (distance(p, q) <= radius) {
        close = true;
        break;
      }
    }
    if (!close) kept.push_back(p);
  }
  return kept;
}

inline double cloud_diameter(const std::vector<StatePoint>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
  }
  return d;
}

}  // namespace koop
