#include "qog/probe.hpp"

#include <cmath>
#include <sstream>

#include "qog/errors.hpp"

namespace qog {

namespace {

constexpr double kAmplitudeSlack = 1e-6;
constexpr double kImaginaryResidue = 1e-10;

}  // namespace

ParityIntermediates parity_intermediates(const ParityInputs& in) {
  if (!(in.r >= 0.0) || !std::isfinite(in.r))
    throw DomainError("parity: squeeze parameter must be finite and >= 0");
  const double a1 = std::norm(in.u1);
  const double a2 = std::norm(in.u2);
  if (!(std::sqrt(a1) <= 1.0 + kAmplitudeSlack) ||
      !(std::sqrt(a2) <= 1.0 + kAmplitudeSlack))
    throw DomainError("parity: |u_l| must not exceed 1");

  const double th = std::tanh(in.r);
  const double th2 = th * th;
  const double ch = std::cosh(in.r);
  const std::complex<double> minus_i(0.0, -1.0);

  ParityIntermediates out;
  const double loss1 = 1.0 - a1;
  const double loss2 = 1.0 - a2;
  out.A1 = 1.0 - loss1 * loss1 * th2;
  out.A2 = 1.0 - loss2 * loss2 * th2;
  out.m1 = minus_i * in.u1 * in.u1 * th / (2.0 * out.A1);
  out.m2 = minus_i * in.u2 * in.u2 * th / (2.0 * out.A2);
  out.p1 = a1 * loss1 * th2 / out.A1;
  out.p2 = a2 * loss2 * th2 / out.A2;
  out.x = 1.0 / (std::sqrt(out.A1 * out.A2) * ch * ch);
  return out;
}

double parity_expectation(const ParityInputs& in) {
  const ParityIntermediates k = parity_intermediates(in);
  const auto m1c = std::conj(k.m1);
  const auto m2c = std::conj(k.m2);
  const double pp = 1.0 - k.p1 * k.p2;
  const std::complex<double> bracket =
      4.0 * k.m1 * (m2c - m1c * (k.p2 * k.p2)) +
      4.0 * k.m2 * (m1c - m2c * (k.p1 * k.p1)) + pp * pp +
      16.0 * std::norm(k.m1 * k.m2);

  const double scale = std::max(1.0, std::abs(bracket.real()));
  if (std::abs(bracket.imag()) > kImaginaryResidue * scale ||
      !(bracket.real() > 0.0)) {
    std::ostringstream msg;
    msg << "parity: bracket is not a positive real (" << bracket.real()
        << ", " << bracket.imag() << ")";
    throw NumericalConsistencyError(msg.str());
  }
  // Same quantity without the O(1) cancellation near parity peaks:
  // |1 + 4 m1 m2*|^2 - p1 p2 (2 - p1 p2) - 4 p2^2 |m1|^2 - 4 p1^2 |m2|^2.
  // Grouped so that exchanging the mode labels leaves the rounding unchanged.
  const double loss_terms =
      k.p1 * k.p2 * (2.0 - k.p1 * k.p2) +
      4.0 * (k.p2 * k.p2 * std::norm(k.m1) + k.p1 * k.p1 * std::norm(k.m2));
  const double value = std::norm(1.0 + 4.0 * k.m1 * m2c) - loss_terms;
  return k.x / std::sqrt(value);
}

double ideal_parity(double N, double Omega, double t) {
  if (!(N >= 0.0)) throw DomainError("ideal parity: N must be >= 0");
  if (!(t >= 0.0)) throw DomainError("ideal parity: t must be >= 0");
  const double c = std::cos(2.0 * Omega * t);
  return 1.0 / std::sqrt(1.0 + N * (2.0 + N) * c * c);
}

double sagnac_map(int n, double Omega) {
  if (n < 1) throw DomainError("sagnac map: mode index must be >= 1");
  return 2.0 * n * Omega;
}

}  // namespace qog
