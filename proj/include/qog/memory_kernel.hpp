#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qog/spectral.hpp"

namespace qog {

/// f(x) ~ sum_k c_k exp(-lambda_k x) with Re(lambda_k) > 0.
///
/// Built from the Laplace-type representation
///   f(x) = eta wc^2 int_0^inf y^s exp(-y) exp(-i wc x y) dy
/// with the contour rotated to y = rho exp(-i phi), rho = exp(v), and the
/// v-integral discretised by the trapezoidal rule. The rotation turns the
/// oscillatory factor into a decaying one, so every term is a damped
/// exponential. Absolute error is uniform in x >= 0 and bounded by
/// tol * f(0).
class ExponentialSumKernel {
 public:
  ExponentialSumKernel() = default;
  static ExponentialSumKernel fit(const SpectralDensity& J, double tol = 1e-14);

  std::complex<double> evaluate(double x) const;
  std::size_t size() const { return weights_.size(); }
  std::span<const std::complex<double>> weights() const { return weights_; }
  std::span<const std::complex<double>> rates() const { return rates_; }

 private:
  std::vector<std::complex<double>> weights_;
  std::vector<std::complex<double>> rates_;
};

}  // namespace qog
