#pragma once

// Rotation sensitivity dOmega(t) = sqrt(1 - Pi^2) / |d Pi / d Omega| for the
// four pipelines (ideal, Born-Markovian, exact, asymptotic two-bound-state),
// local-minima envelopes and log-log power-law fits.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qog/probe_config.hpp"
#include "qog/spectral.hpp"
#include "qog/spectrum.hpp"
#include "qog/volterra.hpp"

namespace qog {

enum class Provenance { kIdeal, kMarkovian, kExact, kAsymptotic };

/// kZeroDerivative marks stationary points where dOmega is infinite.
enum class NodeFlag { kOk, kZeroDerivative };

const char* to_string(Provenance p);
const char* to_string(NodeFlag f);

struct SensitivitySeries {
  std::vector<double> times;
  std::vector<double> delta_omega;  ///< +inf at flagged nodes
  std::vector<NodeFlag> flags;
  Provenance provenance = Provenance::kIdeal;

  std::size_t size() const { return times.size(); }
  void push(double t, double value, NodeFlag flag);
};

struct FitResult {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  ///< rms of log(y) - log(fit)
  std::size_t points = 0;
};

/// Derivatives below this magnitude are treated as zero.
inline constexpr double kZeroDerivative = 1e-14;
/// Central differences at h, h/2, ..., h/2^levels combined by Richardson.
inline constexpr int kRichardsonLevels = 2;

/// h = max(1e-6, 1e-4 |Omega|), capped at 1e-2 / (t_max (N + 1)) when
/// t_max > 0. The parity varies in Omega on the scale 1 / (t N), so the cap
/// keeps h well below the sensitivity being resolved at long times.
double finite_difference_step(double Omega, double t_max = 0.0, double N = 0.0);

struct Propagation {
  double delta_omega = 0.0;
  NodeFlag flag = NodeFlag::kOk;
  double parity = 0.0;
  double derivative = 0.0;
  /// Relative change of the derivative between the last two extrapolation
  /// levels. Zero with levels = 0.
  double richardson_change = 0.0;
};

/// Error propagation from samples: pi0 = Pi(Omega), plus[k] = Pi(Omega + h/2^k)
/// and minus[k] = Pi(Omega - h/2^k). Throws NumericalConsistencyError if pi0
/// lies outside (0, 1] by more than 1e-12.
Propagation propagate(double pi0, std::span<const double> plus,
                      std::span<const double> minus, double h);

/// Error propagation on a callable Omega -> Pi.
Propagation error_propagation(const std::function<double(double)>& pi_of_Omega,
                              double Omega, double h,
                              int levels = kRichardsonLevels);

/// Born-Markovian closed form
///   (2 e^{2 k t} + N C e^{-2 k t}) sqrt(C) / (sqrt(8N) (N+2) t |sin 4 Omega t|),
///   C = 4 e^{2 k t} + N - 2 + (N + 2) cos(4 Omega t).
/// Returns +inf where sin(4 Omega t) vanishes.
double markovian_sensitivity(double N, double kappa, double Omega, double t);

/// Series on grid nodes 1..steps (t = 0 is excluded).
SensitivitySeries ideal_series(double N, double Omega, const TimeGrid& grid);
SensitivitySeries markovian_series(double N, double kappa, double Omega,
                                   const TimeGrid& grid);

struct ExactSensitivity {
  SensitivitySeries series;
  Trajectory trajectory;  ///< solution at the nominal Omega
  /// Relative Richardson changes over unflagged nodes. The maximum is set by
  /// nodes next to stationary points where the derivative nearly vanishes.
  double median_richardson_change = 0.0;
  double max_richardson_change = 0.0;
};

/// Solves the Volterra equation at Omega and Omega +- h/2^k with one shared
/// memory kernel and propagates the parity signal node by node.
ExactSensitivity exact_sensitivity(const SpectralDensity& J,
                                   const ProbeConfig& cfg, const TimeGrid& grid,
                                   const SolverOptions& options = {});

/// Long-time two-bound-state model: bound states at Omega and dZ_l/dOmega.
struct AsymptoticModel {
  BoundState bound1;
  BoundState bound2;
  double dZ1 = 0.0;
  double dZ2 = 0.0;

  /// dZ_l by central difference of the residue weight with step `step`.
  /// Throws RegimeError unless both modes bind at Omega and Omega +- step.
  static AsymptoticModel build(const SpectralDensity& J, const ProbeConfig& cfg,
                               double step = 1e-6);
};

/// Long-time sensitivity
///   F sqrt(2F - 4) / (2N(2+N)) / |d(Z1^2 + Z2^2 - 1)^2 / (4 + 2N)
///     + Z1^2 Z2^2 [t (Z1 + Z2) sin(2Gt) - 2 d ln(Z1 Z2) cos^2(Gt)]|,
///   F = 2 + N sum Z_l^2 (2 - Z_l^2) + N Z1^2 Z2^2 [N + (2 + N) cos(2Gt)],
///   G = E_b1 - E_b2, d = d/dOmega.
/// Returns +inf where the denominator vanishes.
double asymptotic_sensitivity(const AsymptoticModel& model, double N, double t);

SensitivitySeries asymptotic_series(const AsymptoticModel& model, double N,
                                    const TimeGrid& grid);

/// Strict discrete local minima; flagged nodes are never minima and act as
/// +inf neighbours. Throws DomainError with fewer than 3 nodes.
SensitivitySeries local_minima_envelope(const SensitivitySeries& series);

/// Least-squares line in (log x, log y). Requires >= 5 points, all positive.
FitResult power_law_fit(std::span<const std::pair<double, double>> points);

}  // namespace qog
