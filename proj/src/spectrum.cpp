#include "qog/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "qog/errors.hpp"
#include "qog/quadrature.hpp"

namespace qog {

namespace {

constexpr double kBisectionTol = 1e-12;
constexpr double kRelTol = 1e-13;

// Geometric breakpoints from `feature` up to the cutoff, so integrands with
// structure on the scale |E| near w = 0 are resolved before the tail map.
std::vector<double> graded_breakpoints(double feature, double omega_c) {
  std::vector<double> points;
  if (feature > 0.0) {
    for (double b = feature; b < omega_c; b *= 8.0) points.push_back(b);
  }
  points.push_back(omega_c);
  return points;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double self_energy(const SpectralDensity& J, Frequency omega_l, double E) {
  if (!(E < 0.0))
    throw DomainError("self energy: E must be < 0 (use theta_density on the "
                      "branch cut)");
  if (J.decoupled()) return omega_l.value;
  const auto points = graded_breakpoints(-E, J.omega_c());
  const double integral = quadrature::integrate_positive_axis(
      [&](double w) { return J.evaluate(Frequency(w)) / (w - E); }, points,
      J.omega_c(), kRelTol);
  return omega_l.value - integral;
}

double self_energy_at_zero(const SpectralDensity& J, Frequency omega_l) {
  return omega_l.value - J.total_weight();
}

double residue_weight(const SpectralDensity& J, double energy) {
  if (!(energy < 0.0))
    throw DomainError("residue weight: bound-state energy must be < 0");
  if (J.decoupled()) return 1.0;
  const auto points = graded_breakpoints(-energy, J.omega_c());
  const double integral = quadrature::integrate_positive_axis(
      [&](double w) {
        const double d = energy - w;
        return J.evaluate(Frequency(w)) / (d * d);
      },
      points, J.omega_c(), kRelTol);
  return 1.0 / (1.0 + integral);
}

std::optional<BoundState> find_bound_state(const SpectralDensity& J,
                                           Frequency omega_l) {
  const double y0 = self_energy_at_zero(J, omega_l);
  if (y0 >= 0.0) return std::nullopt;

  auto g = [&](double E) { return self_energy(J, omega_l, E) - E; };
  double lo = y0;
  double hi = 0.0;
  // Y decreases on E < 0 and Y(E) >= Y(0) there, so g(Y(0)) >= 0 > g(0-).
  if (!(g(lo) >= 0.0))
    throw NumericalConsistencyError(
        "bound state: bracket [Y(0), 0] does not straddle the root");
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid >= 0.0 || mid <= lo) break;
    if (g(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  BoundState out;
  out.energy = 0.5 * (lo + hi);
  out.weight = residue_weight(J, out.energy);
  return out;
}

double theta_density(const SpectralDensity& J, Frequency omega_l, double E) {
  if (!(E > 0.0))
    throw DomainError("theta density: E must be > 0");
  const double j = J.evaluate(Frequency(E));
  if (j == 0.0) return 0.0;
  const double detuning = E - omega_l.value - J.lamb_shift(Frequency(E));
  const double width = std::numbers::pi * j;
  return j / (detuning * detuning + width * width);
}

double branch_cut_weight(const SpectralDensity& J, Frequency omega_l) {
  if (J.decoupled()) return 0.0;
  const double kappa = J.decay_rate(omega_l);
  const double centre = omega_l.value + J.lamb_shift(omega_l);
  auto theta = [&](double E) { return theta_density(J, omega_l, E); };

  std::vector<double> points;
  const double panel = 0.25 * kappa;
  const double lo = std::max(centre - 10.0 * kappa, 0.0);
  const double hi = centre + 10.0 * kappa;
  if (hi > 0.0 && panel > 0.0) {
    points.push_back(lo);
    for (double b = lo + panel; b < hi; b += panel) points.push_back(b);
    points.push_back(hi);
  }
  return quadrature::integrate_positive_axis(theta, points, J.omega_c(),
                                             1e-10);
}

double binding_threshold(double eta, double s, Frequency omega_l) {
  if (eta == 0.0) return std::numeric_limits<double>::infinity();
  return omega_l.value / (eta * std::tgamma(s));
}

RegimeReport classify(const SpectralDensity& J, const ProbeConfig& cfg) {
  cfg.validate();
  RegimeReport report;
  report.bound1 = find_bound_state(J, Frequency(cfg.omega1()));
  report.bound2 = find_bound_state(J, Frequency(cfg.omega2()));
  report.threshold1 = binding_threshold(J.eta(), J.s(), Frequency(cfg.omega1()));
  report.threshold2 = binding_threshold(J.eta(), J.s(), Frequency(cfg.omega2()));
  const int count = (report.bound1 ? 1 : 0) + (report.bound2 ? 1 : 0);
  report.regime = count == 0   ? Regime::kNone
                  : count == 1 ? Regime::kOneBound
                               : Regime::kTwoBound;
  return report;
}

std::pair<std::complex<double>, std::complex<double>> asymptotic_u(
    const RegimeReport& report, double t) {
  auto amplitude = [t](const std::optional<BoundState>& b) {
    if (!b) return std::complex<double>(0.0, 0.0);
    return b->weight * std::polar(1.0, -b->energy * t);
  };
  return {amplitude(report.bound1), amplitude(report.bound2)};
}

std::pair<double, double> bound_state_gradient(const SpectralDensity& J,
                                               const ProbeConfig& cfg) {
  const RegimeReport report = classify(J, cfg);
  if (report.regime != Regime::kTwoBound)
    throw RegimeError(
        "bound-state gradient requires both modes to form bound states "
        "(regime is " + std::string(to_string(report.regime)) + ")");
  return {report.bound1->weight, -report.bound2->weight};
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::kNone:
      return "None";
    case Regime::kOneBound:
      return "OneBound";
    case Regime::kTwoBound:
      return "TwoBound";
  }
  return "None";
}

std::string format_report(const RegimeReport& report) {
  std::ostringstream out;
  out << "regime=" << to_string(report.regime) << '\n';
  out << "threshold_omega_c_1=" << format_double(report.threshold1) << '\n';
  out << "threshold_omega_c_2=" << format_double(report.threshold2) << '\n';
  auto emit = [&](int l, const std::optional<BoundState>& b) {
    out << "E_b" << l << '=' << (b ? format_double(b->energy) : "none") << '\n';
    out << "Z_" << l << '=' << (b ? format_double(b->weight) : "none") << '\n';
  };
  emit(1, report.bound1);
  emit(2, report.bound2);
  return out.str();
}

}  // namespace qog
