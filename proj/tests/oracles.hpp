#pragma once

// Closed-form references the tests freeze expected values against. These are
// independent of the library's evaluation paths: plain formulas only.

#include <cmath>
#include <cstddef>

namespace oracle {

/// Solution of x' = x(1-x): x e^t / (1 - x + x e^t).
inline double logistic(double t, double x) {
  const double et = std::exp(t);
  return x * et / (1.0 - x + x * et);
}

/// Solution of x' = -a x.
inline double linear_decay(double t, double x, double a = 1.0) {
  return x * std::exp(-a * t);
}

/// k-fold resolvent iterate of the linear scalar relation A x = a x.
inline double cl_linear(double t, std::size_t k, double a, double x) {
  return x / std::pow(1.0 + a * t / static_cast<double>(k), static_cast<double>(k));
}

/// Laplace resolvent of exp(-x) under translation: integral e^{-nu t} e^{-(x+t)} dt.
inline double translation_resolvent_exp(double nu, double x) {
  return std::exp(-x) / (nu + 1.0);
}

/// Compactified translation in the chart y = x/(1+x).
inline double compactified_translation(double t, double y) {
  const double u = t * (1.0 - y);
  return (y + u) / (1.0 + u);
}

}  // namespace oracle
