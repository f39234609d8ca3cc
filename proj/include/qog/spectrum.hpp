#pragma once

// Laplace-domain structure of the single-excitation mode-plus-bath problem:
//
//   Y_l(E) = w_l - int_0^inf J(w) / (w - E) dw,
//
// an isolated root of Y_l(E) = E on E < 0 (bound state) with residue Z_l, and
// the branch-cut density Theta(E) on E > 0.

#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "qog/probe_config.hpp"
#include "qog/spectral.hpp"

namespace qog {

struct BoundState {
  double energy = 0.0;  ///< E_b < 0
  double weight = 0.0;  ///< Z in (0, 1]
};

enum class Regime { kNone, kOneBound, kTwoBound };

struct RegimeReport {
  std::optional<BoundState> bound1;
  std::optional<BoundState> bound2;
  Regime regime = Regime::kNone;
  /// Cutoff frequencies w_l / (eta Gamma(s)) above which mode l binds.
  double threshold1 = 0.0;
  double threshold2 = 0.0;
};

/// Y_l(E) for E < 0 by quadrature. Throws DomainError for E >= 0.
double self_energy(const SpectralDensity& J, Frequency omega_l, double E);

/// Y_l(0-) = w_l - eta wc Gamma(s), closed form.
double self_energy_at_zero(const SpectralDensity& J, Frequency omega_l);

/// Residue weight Z = [1 + int_0^inf J(w) / (E_b - w)^2 dw]^-1.
double residue_weight(const SpectralDensity& J, double energy);

/// Bisection of Y_l(E) - E on [Y_l(0), 0) to 1e-12. Absent when Y_l(0) >= 0
/// (a root exactly at threshold counts as absent).
std::optional<BoundState> find_bound_state(const SpectralDensity& J,
                                           Frequency omega_l);

/// Theta(E) = J(E) / ([E - w_l - Delta(E)]^2 + [pi J(E)]^2), E > 0.
double theta_density(const SpectralDensity& J, Frequency omega_l, double E);

/// int_0^inf Theta(E) dE, refined around the resonance near w_l.
double branch_cut_weight(const SpectralDensity& J, Frequency omega_l);

/// Threshold cutoff w_l / (eta Gamma(s)); +inf when eta = 0.
double binding_threshold(double eta, double s, Frequency omega_l);

RegimeReport classify(const SpectralDensity& J, const ProbeConfig& cfg);

/// Long-time amplitudes Z_l exp(-i E_b,l t); zero for an unbound mode.
std::pair<std::complex<double>, std::complex<double>> asymptotic_u(
    const RegimeReport& report, double t);

/// (dE_b1/dOmega, dE_b2/dOmega) = (Z_1, -Z_2), from implicit
/// differentiation of Y_l(E) = E. Throws RegimeError unless both modes bind.
std::pair<double, double> bound_state_gradient(const SpectralDensity& J,
                                               const ProbeConfig& cfg);

const char* to_string(Regime regime);

/// Flat key=value block: regime, thresholds, E_b1, Z_1, E_b2, Z_2.
std::string format_report(const RegimeReport& report);

}  // namespace qog
