#include "qog/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qog/errors.hpp"
#include "qog/quadrature.hpp"

namespace qog {

namespace {

constexpr double kPvAgreement = 1e-9;
constexpr int kPvMaxHalvings = 40;

}  // namespace

SpectralDensity::SpectralDensity(double eta, double omega_c, double s)
    : eta_(eta), omega_c_(omega_c), s_(s) {
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw DomainError("spectral density: eta must be finite and >= 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c))
    throw DomainError("spectral density: omega_c must be finite and > 0");
  if (!(s > 0.0) || !std::isfinite(s))
    throw DomainError("spectral density: Ohmicity s must be > 0");
  kernel_zero_ = eta_ * std::tgamma(s_ + 1.0) * omega_c_ * omega_c_;
  total_weight_ = eta_ * omega_c_ * std::tgamma(s_);
}

double SpectralDensity::evaluate(Frequency omega) const {
  const double w = omega.value;
  if (!(w >= 0.0))
    throw DomainError("spectral density: frequency must be >= 0, got " +
                      std::to_string(w));
  if (eta_ == 0.0 || w == 0.0) return 0.0;
  return eta_ * std::pow(w, s_) * std::pow(omega_c_, 1.0 - s_) *
         std::exp(-w / omega_c_);
}

double SpectralDensity::derivative(double omega) const {
  if (eta_ == 0.0 || omega <= 0.0) return 0.0;
  return evaluate(Frequency(omega)) * (s_ / omega - 1.0 / omega_c_);
}

std::complex<double> SpectralDensity::kernel(double x) const {
  if (!(x >= 0.0))
    throw DomainError("kernel: time argument must be >= 0");
  if (eta_ == 0.0) return {0.0, 0.0};
  const std::complex<double> base(1.0, omega_c_ * x);
  return kernel_zero_ / std::pow(base, s_ + 1.0);
}

double SpectralDensity::decay_rate(Frequency omega_l) const {
  if (!(omega_l.value > 0.0))
    throw DomainError("decay rate: mode frequency must be > 0");
  return std::numbers::pi * evaluate(omega_l);
}

double SpectralDensity::lamb_shift(Frequency omega_l) const {
  const double wl = omega_l.value;
  if (!(wl > 0.0))
    throw DomainError("lamb shift: mode frequency must be > 0");
  if (eta_ == 0.0) return 0.0;

  const double j_pole = evaluate(omega_l);
  const double slope = derivative(wl);
  auto direct = [this, wl](double w) {
    return evaluate(Frequency(w)) / (wl - w);
  };
  // J(w_l) / (w_l - w) integrates to zero over a window symmetric about w_l,
  // so only the regular remainder is integrated there.
  auto regular = [this, wl, j_pole, slope](double w) {
    const double d = wl - w;
    if (std::abs(d) < 1e-9 * wl) return -slope;
    return (evaluate(Frequency(w)) - j_pole) / d;
  };
  // Outside the window the integrand varies on the scale of the distance to
  // the pole, so panels grow geometrically away from it.
  auto pv_with_window = [&](double half) {
    double total = 0.0;
    double hi = wl - half;
    for (double gap = 4.0 * half; hi > 0.0; gap *= 4.0) {
      const double lo = std::max(wl - gap, 0.0);
      total += quadrature::integrate(direct, lo, hi);
      hi = lo;
    }
    total += quadrature::gauss_legendre(regular, wl - half, wl);
    total += quadrature::gauss_legendre(regular, wl, wl + half);
    double lo = wl + half;
    for (double gap = 4.0 * half; gap < omega_c_; gap *= 4.0) {
      total += quadrature::integrate(direct, lo, wl + gap);
      lo = wl + gap;
    }
    total += quadrature::integrate_to_infinity(direct, lo, omega_c_);
    return total;
  };

  double half = 0.5 * std::min(wl, omega_c_);
  double previous = pv_with_window(half);
  for (int i = 0; i < kPvMaxHalvings; ++i) {
    half *= 0.5;
    const double current = pv_with_window(half);
    if (std::abs(current - previous) < kPvAgreement) return current;
    previous = current;
  }
  throw NumericalConsistencyError(
      "lamb shift: principal value did not converge under window halving");
}

std::complex<double> kernel_by_quadrature(const SpectralDensity& J, double x,
                                          double rel_tol) {
  if (!(x >= 0.0))
    throw DomainError("kernel quadrature: time argument must be >= 0");
  if (J.decoupled()) return {0.0, 0.0};

  const double wc = J.omega_c();
  const double s = J.s();
  // Truncate where the remaining weight is below 1e-18 of the total.
  double cutoff = 40.0 * wc;
  while (std::pow(cutoff / wc, s) * std::exp(-cutoff / wc) >
         1e-18 * std::tgamma(s + 1.0)) {
    cutoff += 5.0 * wc;
  }
  const double panel =
      x > 0.0 ? std::min(std::numbers::pi / x, wc) : wc;
  // The phase w x is formed in extended precision; at w x ~ 1e4 a double
  // product would already carry 1e-12 of absolute phase error.
  auto cosine = [&](double w) {
    return J.evaluate(Frequency(w)) *
           static_cast<double>(std::cos(static_cast<long double>(w) * x));
  };
  auto sine = [&](double w) {
    return J.evaluate(Frequency(w)) *
           static_cast<double>(std::sin(static_cast<long double>(w) * x));
  };

  // Only the first panel holds the w^s endpoint and needs adaptivity. The
  // others are at most half a period of a smooth integrand, where a relative
  // test would stall on panels whose integral cancels to rounding level.
  long double re = quadrature::integrate(cosine, 0.0, panel, rel_tol);
  long double im = x > 0.0 ? -quadrature::integrate(sine, 0.0, panel, rel_tol) : 0.0;
  for (std::size_t k = 1;; ++k) {
    const double lo = static_cast<double>(k) * panel;
    if (lo >= cutoff) break;
    const double hi = std::min(lo + panel, cutoff);
    re += quadrature::gauss_legendre(cosine, lo, hi);
    if (x > 0.0) im -= quadrature::gauss_legendre(sine, lo, hi);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace qog
