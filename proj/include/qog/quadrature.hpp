#pragma once

// Adaptive Gauss-Kronrod quadrature on finite panels and on [a, inf).
//
// The semi-infinite map is w = a + scale * y / (1 - y), y in [0, 1). Kronrod
// nodes are interior, so integrands are never evaluated at panel endpoints;
// callers rely on this for integrable endpoint singularities.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <span>

namespace qog::quadrature {

inline constexpr double kDefaultRelTol = 1e-12;
inline constexpr unsigned kMaxDepth = 18;

/// Boost 1.74 compares the Kronrod error estimate in the reference variable
/// against a tolerance in the physical one, so narrow panels never pass the
/// test. Every panel is therefore mapped onto [0, 1] first.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = kDefaultRelTol) {
  if (a == b) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double width = b - a;
  auto unit = [&](double y) { return f(a + width * y); };
  double err = 0.0;
  return width * GK::integrate(unit, 0.0, 1.0, kMaxDepth, rel_tol, &err);
}

/// Fixed 30-point Gauss-Legendre rule for integrands analytic on [a, b] whose
/// rounding noise would stall an adaptive relative-tolerance test.
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

template <class F>
double integrate_to_infinity(F&& f, double a, double scale,
                             double rel_tol = kDefaultRelTol) {
  auto mapped = [&](double y) {
    const double one_minus = 1.0 - y;
    const double w = a + scale * y / one_minus;
    const double jac = scale / (one_minus * one_minus);
    const double v = f(w);
    return v == 0.0 ? 0.0 : v * jac;
  };
  return integrate(mapped, 0.0, 1.0, rel_tol);
}

/// Integral over [0, inf) split at increasing interior breakpoints; the last
/// panel uses the semi-infinite map with the given scale.
template <class F>
double integrate_positive_axis(F&& f, std::span<const double> breakpoints,
                               double scale, double rel_tol = kDefaultRelTol) {
  double total = 0.0;
  double lo = 0.0;
  for (double b : breakpoints) {
    if (!(b > lo)) continue;
    total += integrate(f, lo, b, rel_tol);
    lo = b;
  }
  total += integrate_to_infinity(f, lo, scale, rel_tol);
  return total;
}

}  // namespace qog::quadrature
