#include "qog/memory_kernel.hpp"

#include <cmath>
#include <numbers>

#include "qog/errors.hpp"

namespace qog {

namespace {

// Rotation angle of the y-contour. Any angle in (0, pi/2) keeps every term
// decaying; pi/4 maximises the strip of analyticity of the v-integrand, which
// sets the trapezoidal convergence rate exp(-pi^2 / (2 h)).
constexpr double kRotation = std::numbers::pi / 4.0;

}  // namespace

ExponentialSumKernel ExponentialSumKernel::fit(const SpectralDensity& J,
                                               double tol) {
  if (!(tol > 0.0 && tol < 1.0))
    throw DomainError("exponential-sum kernel: tolerance must be in (0, 1)");
  ExponentialSumKernel out;
  if (J.decoupled()) return out;

  const double s = J.s();
  const double wc = J.omega_c();
  const double gamma = std::tgamma(s + 1.0);
  const double log_inv_tol = -std::log(tol);
  // The discretisation constant grows with s; the 3.5 s margin is empirical.
  const double h = std::numbers::pi * std::numbers::pi /
                   (2.0 * (log_inv_tol + 4.0 + 3.5 * s));

  // Left tail of int exp((s+1) v) dv below v_min is exp((s+1) v_min)/(s+1).
  const double v_min = std::log(tol * gamma * (s + 1.0)) / (s + 1.0);
  // Right tail: integrand modulus exp((s+1) v - e^v cos(phi)).
  const double cos_rot = std::cos(kRotation);
  auto modulus = [&](double v) {
    return std::exp((s + 1.0) * v - std::exp(v) * cos_rot);
  };
  double v_max = std::max(0.0, std::log((s + 1.0) / cos_rot));
  while (modulus(v_max) > 1e-2 * tol * gamma) v_max += h;

  const std::complex<double> rot = std::polar(1.0, -kRotation);
  const std::complex<double> prefactor =
      J.eta() * wc * wc * std::polar(1.0, -(s + 1.0) * kRotation) * h;
  const std::complex<double> i_unit(0.0, 1.0);

  const auto count = static_cast<std::size_t>(std::ceil((v_max - v_min) / h)) + 1;
  out.weights_.reserve(count);
  out.rates_.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double v = v_min + static_cast<double>(k) * h;
    const double rho = std::exp(v);
    out.weights_.push_back(prefactor * std::exp((s + 1.0) * v) *
                           std::exp(-rho * rot));
    out.rates_.push_back(i_unit * wc * rho * rot);
  }
  return out;
}

std::complex<double> ExponentialSumKernel::evaluate(double x) const {
  std::complex<double> sum(0.0, 0.0);
  for (std::size_t k = 0; k < weights_.size(); ++k)
    sum += weights_[k] * std::exp(-rates_[k] * x);
  return sum;
}

}  // namespace qog
