#pragma once

// Exact amplitude dynamics of the two dissipative modes:
//
//   du/dt + i w_l u + int_0^t f(t - tau) u(tau) dtau = 0,   u(0) = 1.
//
// Between grid nodes u and the memory integral M(t) are taken piecewise
// linear. The free rotation exp(-i w_l t) is integrated exactly, and since the
// equation is linear the implicit trapezoid-type step is solved in closed
// form. With the exponential-sum kernel each exponential is integrated
// exactly against the linear interpolant of u; the direct route uses the
// trapezoidal rule over the stored history.

#include <complex>
#include <cstddef>
#include <vector>

#include "qog/memory_kernel.hpp"
#include "qog/probe_config.hpp"
#include "qog/spectral.hpp"

namespace qog {

enum class MemoryScheme {
  /// History represented by recursively updated exponential-sum moments,
  /// each integrated exactly against linear u; cost O(T * K), K ~ 150.
  kExponentialSum,
  /// Direct trapezoidal history sum truncated at depth M where
  /// |f(M dt)| < truncation_tol * |f(0)|; cost O(T * M).
  kDirect,
};

struct SolverOptions {
  MemoryScheme scheme = MemoryScheme::kExponentialSum;
  double truncation_tol = 1e-8;
  double exponential_sum_tol = 1e-14;
};

struct MemoryReport {
  MemoryScheme scheme = MemoryScheme::kExponentialSum;
  /// History depth in steps (direct) or number of exponentials.
  std::size_t depth = 0;
  /// Direct: int_{M dt}^inf |f|. Exponential sum: max |f_approx - f| / f(0)
  /// over sampled lags up to t_max.
  double error_estimate = 0.0;
};

struct ModeSolution {
  std::vector<std::complex<double>> u;
  std::vector<std::complex<double>> du;
};

/// Memory kernel prepared for one grid spacing. Independent of the mode
/// frequency, so one instance serves both modes and all Omega-shifted solves.
class MemoryKernel {
 public:
  MemoryKernel(const SpectralDensity& J, const TimeGrid& grid,
               const SolverOptions& options = {});

  ModeSolution solve_mode(double omega_l) const;
  const MemoryReport& report() const { return report_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  MemoryScheme scheme_;
  double f0_;
  MemoryReport report_;
  // Exponential sum c_k exp(-lambda_k x), stored split into real and
  // imaginary parts: weights c, step decay d = exp(-lambda dt), hat-function
  // weights a (left node) and g = d b + a (moment recursion).
  std::vector<double> c_re_, c_im_, decay_re_, decay_im_, g_re_, g_im_;
  std::complex<double> initial_history_{0.0, 0.0};
  // Coefficient of u_{n+1} in M(t_{n+1}).
  std::complex<double> implicit_{0.0, 0.0};
  std::vector<std::complex<double>> left_;
  // Direct table f(m dt), m = 0..M.
  std::vector<std::complex<double>> table_;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<std::complex<double>> u1, u2;
  std::vector<std::complex<double>> du1, du2;
  MemoryReport memory;
};

/// Throws SolverDiagnosticError if |u| exceeds 1 + 1e-3 anywhere.
Trajectory solve(const SpectralDensity& J, const ProbeConfig& cfg,
                 const TimeGrid& grid, const SolverOptions& options = {});

/// min(0.02 / wc, 0.02 / w_l, 0.05 / sqrt(f(0))).
double default_dt(const SpectralDensity& J, const ProbeConfig& cfg);

struct ConvergenceReport {
  double dt = 0.0;
  double relative_change = 0.0;
  int halvings = 0;
  bool converged = false;
};

struct ConvergedTrajectory {
  Trajectory trajectory;
  ConvergenceReport convergence;
};

/// Starts from default_dt and halves dt until halving changes u_l(t_max) by
/// less than rel_tol (relative) for both modes, or max_halvings is reached.
/// The returned trajectory is the one on the accepted (coarser) grid.
ConvergedTrajectory solve_converged(const SpectralDensity& J,
                                    const ProbeConfig& cfg, double t_max,
                                    const SolverOptions& options = {},
                                    double rel_tol = 1e-5,
                                    int max_halvings = 8);

/// Relative change of u_l(t_max) between the trajectory's dt and dt / 2.
double grid_change_estimate(const SpectralDensity& J, const ProbeConfig& cfg,
                            const TimeGrid& grid,
                            const SolverOptions& options = {});

/// Same estimate reusing an already computed trajectory on the fine grid.
double grid_change_estimate(const SpectralDensity& J, const ProbeConfig& cfg,
                            const Trajectory& fine,
                            const SolverOptions& options = {});

/// Time-local master equation coefficients: renormalised frequency
/// varpi = -Im(du/u) and dissipation rate gamma = -Re(du/u).
struct MasterEquationSeries {
  std::vector<double> varpi1, gamma1, varpi2, gamma2;
  /// false where |u_l| < 1e-12 and the ratio is undefined.
  std::vector<bool> defined1, defined2;
};

MasterEquationSeries masteq_coefficients(const Trajectory& traj);

}  // namespace qog
