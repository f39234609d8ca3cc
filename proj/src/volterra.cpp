#include "qog/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qog/errors.hpp"
#include "qog/quadrature.hpp"

namespace qog {

namespace {

using cplx = std::complex<double>;

constexpr double kSanityBound = 1.0 + 1e-3;
constexpr double kUndefinedAmplitude = 1e-12;

// Lag beyond which |f(x)| / f(0) = (1 + wc^2 x^2)^(-(s+1)/2) drops below tol.
double truncation_lag(const SpectralDensity& J, double tol) {
  const double ratio = std::pow(tol, -2.0 / (J.s() + 1.0)) - 1.0;
  return std::sqrt(std::max(ratio, 0.0)) / J.omega_c();
}

double max_sum_deviation(const SpectralDensity& J,
                         const ExponentialSumKernel& sum, double t_max) {
  double worst = 0.0;
  auto probe = [&](double x) {
    worst = std::max(worst, std::abs(sum.evaluate(x) - J.kernel(x)));
  };
  for (int i = 0; i <= 200; ++i) probe(t_max * i / 200.0);
  for (int i = 0; i <= 100; ++i) {
    const double x = 1e-3 / J.omega_c() * std::pow(10.0, 0.07 * i);
    if (x <= t_max) probe(x);
  }
  return worst / J.kernel_at_zero();
}

// Weights of the linear hat functions under exp(-lambda (dt - s)):
//   a = int_0^dt e^{-lambda (dt - s)} (1 - s/dt) ds,
//   b = int_0^dt e^{-lambda (dt - s)} (s/dt) ds,   z = lambda dt.
std::pair<cplx, cplx> hat_weights(cplx z, double dt) {
  cplx a, b;
  if (std::abs(z) < 1.0) {
    // a/dt = sum (-z)^k (k+1)/(k+2)!,  b/dt = sum (-z)^k/(k+2)!
    cplx term(0.5, 0.0);  // (-z)^k / (k+2)! at k = 0
    a = b = 0.0;
    for (int k = 0; k < 30; ++k) {
      b += term;
      a += static_cast<double>(k + 1) * term;
      term *= -z / static_cast<double>(k + 3);
    }
  } else {
    const cplx e = std::exp(-z);
    const cplx z2 = z * z;
    a = (1.0 - e - z * e) / z2;
    b = (z - 1.0 + e) / z2;
  }
  return {a * dt, b * dt};
}

void check_amplitude(const cplx& u, std::size_t step, double dt) {
  if (!(std::abs(u) <= kSanityBound)) {
    std::ostringstream msg;
    msg << "volterra: |u| = " << std::abs(u) << " exceeds 1 + 1e-3 at step "
        << step << " (dt = " << dt << "); reduce dt";
    throw SolverDiagnosticError(msg.str());
  }
}

}  // namespace

MemoryKernel::MemoryKernel(const SpectralDensity& J, const TimeGrid& grid,
                           const SolverOptions& options)
    : grid_(grid), scheme_(options.scheme), f0_(J.kernel_at_zero()) {
  report_.scheme = scheme_;
  if (J.decoupled()) return;

  const std::size_t steps = grid_.steps();
  if (scheme_ == MemoryScheme::kExponentialSum) {
    const auto sum = ExponentialSumKernel::fit(J, options.exponential_sum_tol);
    const std::size_t k = sum.size();
    c_re_.resize(k);
    c_im_.resize(k);
    decay_re_.resize(k);
    decay_im_.resize(k);
    g_re_.resize(k);
    g_im_.resize(k);
    left_.resize(k);
    const double dt = grid_.dt;
    for (std::size_t i = 0; i < k; ++i) {
      const cplx c = sum.weights()[i];
      const cplx z = sum.rates()[i] * dt;
      const cplx d = std::exp(-z);
      const auto [a, b] = hat_weights(z, dt);
      c_re_[i] = c.real();
      c_im_[i] = c.imag();
      decay_re_[i] = d.real();
      decay_im_[i] = d.imag();
      const cplx g = d * b + a;
      g_re_[i] = g.real();
      g_im_[i] = g.imag();
      left_[i] = a;
      initial_history_ += c * a;
      implicit_ += c * b;
    }
    report_.depth = k;
    report_.error_estimate = max_sum_deviation(J, sum, grid_.t_max);
  } else {
    const double lag = truncation_lag(J, options.truncation_tol);
    const double depth_real = std::ceil(lag / grid_.dt);
    const std::size_t depth =
        depth_real >= static_cast<double>(steps)
            ? steps
            : static_cast<std::size_t>(depth_real);
    table_.resize(depth + 1);
    for (std::size_t m = 0; m <= depth; ++m) table_[m] = J.kernel(grid_.time(m));
    report_.depth = depth;
    implicit_ = 0.5 * grid_.dt * f0_;
    if (depth < steps) {
      const double f0 = f0_;
      const double wc = J.omega_c();
      const double p = 0.5 * (J.s() + 1.0);
      report_.error_estimate = quadrature::integrate_to_infinity(
          [=](double x) { return f0 * std::pow(1.0 + wc * wc * x * x, -p); },
          grid_.time(depth), 1.0 / wc);
    }
  }
}

ModeSolution MemoryKernel::solve_mode(double omega_l) const {
  const std::size_t steps = grid_.steps();
  const double dt = grid_.dt;
  const cplx i_unit(0.0, 1.0);

  ModeSolution out;
  out.u.resize(steps + 1);
  out.du.resize(steps + 1);
  out.u[0] = 1.0;
  out.du[0] = -i_unit * omega_l;

  const bool coupled = f0_ != 0.0;
  const std::size_t k = c_re_.size();
  // Moments P_k(n) = d_k Q_k(n) + a_k u_n, Q_k the exact convolution of the
  // k-th exponential with the interpolated history; P_k(0) = a_k.
  std::vector<double> p_re(k), p_im(k);
  for (std::size_t i = 0; i < k; ++i) {
    p_re[i] = left_[i].real();
    p_im[i] = left_[i].imag();
  }
  const std::size_t depth = table_.empty() ? 0 : table_.size() - 1;

  // In the frame v = exp(i w t) u:
  //   v_{n+1} = v_n - rot_{n+1} (alpha M_n + beta M_{n+1}),
  //   M_{n+1} = H_n + B u_{n+1},
  // with alpha, beta the hat weights of exp(-i w (dt - s)).
  const auto [alpha, beta] = hat_weights(i_unit * omega_l * dt, dt);
  const cplx denom = 1.0 + beta * implicit_;
  cplx v(1.0, 0.0);
  cplx memory(0.0, 0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    // History part H_n of M(t_{n+1}); depends on u_0..u_n only.
    cplx history(0.0, 0.0);
    if (coupled && scheme_ == MemoryScheme::kExponentialSum) {
      if (n == 0) {
        history = initial_history_;
      } else {
        const double u_re = out.u[n].real();
        const double u_im = out.u[n].imag();
        double h_re = 0.0, h_im = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          const double x_re = decay_re_[i] * p_re[i] - decay_im_[i] * p_im[i] +
                              g_re_[i] * u_re - g_im_[i] * u_im;
          const double x_im = decay_re_[i] * p_im[i] + decay_im_[i] * p_re[i] +
                              g_re_[i] * u_im + g_im_[i] * u_re;
          p_re[i] = x_re;
          p_im[i] = x_im;
          h_re += c_re_[i] * x_re - c_im_[i] * x_im;
          h_im += c_re_[i] * x_im + c_im_[i] * x_re;
        }
        history = {h_re, h_im};
      }
    } else if (coupled) {
      const std::size_t next = n + 1;
      if (next <= depth) history += 0.5 * table_[next] * out.u[0];
      const std::size_t first = next > depth ? next - depth : 1;
      for (std::size_t j = first; j <= n; ++j)
        history += table_[next - j] * out.u[j];
      history *= dt;
    }

    const cplx rot = std::polar(1.0, omega_l * grid_.time(n + 1));
    const cplx back = std::conj(rot);
    v = (v - rot * (alpha * memory + beta * history)) / denom;
    const cplx u1 = v * back;
    memory = history + implicit_ * u1;

    check_amplitude(u1, n + 1, dt);
    out.u[n + 1] = u1;
    out.du[n + 1] = -i_unit * omega_l * u1 - memory;
  }
  return out;
}

Trajectory solve(const SpectralDensity& J, const ProbeConfig& cfg,
                 const TimeGrid& grid, const SolverOptions& options) {
  cfg.validate();
  const MemoryKernel kernel(J, grid, options);
  Trajectory traj;
  traj.grid = grid;
  traj.memory = kernel.report();
  auto mode1 = kernel.solve_mode(cfg.omega1());
  auto mode2 = kernel.solve_mode(cfg.omega2());
  traj.u1 = std::move(mode1.u);
  traj.du1 = std::move(mode1.du);
  traj.u2 = std::move(mode2.u);
  traj.du2 = std::move(mode2.du);
  return traj;
}

double default_dt(const SpectralDensity& J, const ProbeConfig& cfg) {
  cfg.validate();
  double dt = std::min({0.02 / J.omega_c(), 0.02 / cfg.omega1(),
                        0.02 / cfg.omega2()});
  if (J.kernel_at_zero() > 0.0)
    dt = std::min(dt, 0.05 / std::sqrt(J.kernel_at_zero()));
  return dt;
}

namespace {

double relative_change(const Trajectory& coarse, const Trajectory& fine) {
  const std::size_t last = coarse.grid.steps();
  const std::size_t fine_index = 2 * last;
  double worst = 0.0;
  auto compare = [&](const cplx& a, const cplx& b) {
    const double scale = std::max(std::abs(b), 1e-12);
    worst = std::max(worst, std::abs(a - b) / scale);
  };
  compare(coarse.u1[last], fine.u1[fine_index]);
  compare(coarse.u2[last], fine.u2[fine_index]);
  return worst;
}

}  // namespace

ConvergedTrajectory solve_converged(const SpectralDensity& J,
                                    const ProbeConfig& cfg, double t_max,
                                    const SolverOptions& options,
                                    double rel_tol, int max_halvings) {
  double dt = std::min(default_dt(J, cfg), t_max);
  Trajectory coarse = solve(J, cfg, TimeGrid(t_max, dt), options);
  ConvergenceReport report;
  for (int halving = 0;; ++halving) {
    Trajectory fine = solve(J, cfg, TimeGrid(t_max, 0.5 * dt), options);
    report.dt = dt;
    report.halvings = halving;
    report.relative_change = relative_change(coarse, fine);
    report.converged = report.relative_change < rel_tol;
    if (report.converged || halving >= max_halvings)
      return {std::move(coarse), report};
    dt *= 0.5;
    coarse = std::move(fine);
  }
}

double grid_change_estimate(const SpectralDensity& J, const ProbeConfig& cfg,
                            const TimeGrid& grid,
                            const SolverOptions& options) {
  return grid_change_estimate(J, cfg, solve(J, cfg, grid, options), options);
}

double grid_change_estimate(const SpectralDensity& J, const ProbeConfig& cfg,
                            const Trajectory& fine,
                            const SolverOptions& options) {
  const TimeGrid doubled(fine.grid.t_max, 2.0 * fine.grid.dt);
  const Trajectory coarse = solve(J, cfg, doubled, options);
  return relative_change(coarse, fine);
}

MasterEquationSeries masteq_coefficients(const Trajectory& traj) {
  MasterEquationSeries out;
  auto fill = [](const std::vector<cplx>& u, const std::vector<cplx>& du,
                 std::vector<double>& varpi, std::vector<double>& gamma,
                 std::vector<bool>& defined) {
    const std::size_t n = u.size();
    varpi.assign(n, std::numeric_limits<double>::quiet_NaN());
    gamma.assign(n, std::numeric_limits<double>::quiet_NaN());
    defined.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(u[i]) < kUndefinedAmplitude) continue;
      const cplx ratio = du[i] / u[i];
      varpi[i] = -ratio.imag();
      gamma[i] = -ratio.real();
      defined[i] = true;
    }
  };
  fill(traj.u1, traj.du1, out.varpi1, out.gamma1, out.defined1);
  fill(traj.u2, traj.du2, out.varpi2, out.gamma2, out.defined2);
  return out;
}

}  // namespace qog
