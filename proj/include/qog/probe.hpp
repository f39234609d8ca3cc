#pragma once

// Parity readout of the two-mode squeezed-vacuum gyroscope.

#include <complex>

namespace qog {

struct ParityInputs {
  std::complex<double> u1;
  std::complex<double> u2;
  /// Squeeze parameter r >= 0.
  double r = 0.0;
};

/// Coefficients of the Gaussian coherent-state kernel of the decayed
/// two-mode state, one (A, m, p) triple per mode, plus the normalisation x.
struct ParityIntermediates {
  double A1 = 1.0, A2 = 1.0;
  std::complex<double> m1, m2;
  double p1 = 0.0, p2 = 0.0;
  double x = 1.0;
};

/// A_l = 1 - (|u_l|^2 - 1)^2 tanh^2 r
/// m_l = -i u_l^2 tanh r / (2 A_l)
/// p_l = |u_l|^2 (1 - |u_l|^2) tanh^2 r / A_l
/// x   = 1 / (sqrt(A_1 A_2) cosh^2 r)
ParityIntermediates parity_intermediates(const ParityInputs& in);

/// Expected output parity
///   x [4 m1 (m2* - m1* p2^2) + 4 m2 (m1* - m2* p1^2) + (1 - p1 p2)^2
///      + 16 |m1 m2|^2]^(-1/2).
/// The bracket is evaluated in complex arithmetic and must come out real.
/// Throws DomainError for |u_l| > 1 + 1e-6 or r < 0, and
/// NumericalConsistencyError if the bracket is not a positive real.
double parity_expectation(const ParityInputs& in);

/// Lossless closed form [1 + N (2 + N) cos^2(2 Omega t)]^(-1/2).
double ideal_parity(double N, double Omega, double t);

/// Sagnac splitting of the n-th standing-wave mode: 2 n Omega.
double sagnac_map(int n, double Omega);

}  // namespace qog
