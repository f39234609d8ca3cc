#pragma once

// Ohmic-family bath: J(w) = eta * w^s * wc^(1-s) * exp(-w / wc).
// Frequencies are in units of the bare mode frequency w0 (w0 = 1), times in
// units of 1 / w0.

#include <complex>

namespace qog {

struct Frequency {
  double value;
  constexpr explicit Frequency(double v) : value(v) {}
};

class SpectralDensity {
 public:
  /// Throws DomainError unless eta >= 0, omega_c > 0 and s > 0.
  SpectralDensity(double eta, double omega_c, double s);

  double eta() const { return eta_; }
  double omega_c() const { return omega_c_; }
  double s() const { return s_; }
  bool decoupled() const { return eta_ == 0.0; }

  double evaluate(Frequency omega) const;

  /// dJ/dw, used to remove the 0/0 at the principal-value pole.
  double derivative(double omega) const;

  /// Bath correlation function f(x) = int_0^inf J(w) exp(-i w x) dw, via the
  /// closed form eta Gamma(s+1) wc^2 (1 + i wc x)^-(s+1).
  std::complex<double> kernel(double x) const;

  /// f(0) = int_0^inf J(w) dw.
  double kernel_at_zero() const { return kernel_zero_; }

  /// kappa = pi J(w_l).
  double decay_rate(Frequency omega_l) const;

  /// Cauchy principal value P int_0^inf J(w) / (w_l - w) dw.
  double lamb_shift(Frequency omega_l) const;

  /// int_0^inf J(w) / w dw = eta wc Gamma(s). A mode with w_l below this
  /// value forms a bound state.
  double total_weight() const { return total_weight_; }

 private:
  double eta_;
  double omega_c_;
  double s_;
  double kernel_zero_;
  double total_weight_;
};

/// Direct oscillatory quadrature of int_0^inf J(w) exp(-i w x) dw. Slow; this
/// is the reference the closed-form kernel is checked against.
std::complex<double> kernel_by_quadrature(const SpectralDensity& J, double x,
                                          double rel_tol = 1e-13);

}  // namespace qog
