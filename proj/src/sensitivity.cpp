#include "qog/sensitivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qog/errors.hpp"
#include "qog/probe.hpp"

namespace qog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParitySlack = 1e-12;
constexpr double kStationarySine = 1e-14;
// Below this value of 1 - Pi^2 the quotient loses digits to cancellation.
constexpr double kFlatTop = 1e-8;
constexpr double kPhaseFraction = 1e-2;

// Richardson-refined (Pi(+h) - 2 Pi(0) + Pi(-h)) / h^2.
double second_derivative(double pi0, std::span<const double> plus,
                         std::span<const double> minus, double h) {
  std::vector<double> prev(plus.size()), cur(plus.size());
  double step = h;
  for (std::size_t k = 0; k < plus.size(); ++k) {
    cur[0] = (plus[k] - 2.0 * pi0 + minus[k]) / (step * step);
    double factor = 4.0;
    for (std::size_t j = 1; j <= k; ++j) {
      cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (factor - 1.0);
      factor *= 4.0;
    }
    std::swap(prev, cur);
    step *= 0.5;
  }
  return prev[plus.size() - 1];
}

std::vector<double> parity_track(const ModeSolution& m1, const ModeSolution& m2,
                                 double r) {
  std::vector<double> out(m1.u.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = parity_expectation({m1.u[i], m2.u[i], r});
  return out;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kIdeal:
      return "ideal";
    case Provenance::kMarkovian:
      return "markovian";
    case Provenance::kExact:
      return "exact";
    case Provenance::kAsymptotic:
      return "asymptotic";
  }
  return "ideal";
}

const char* to_string(NodeFlag f) {
  return f == NodeFlag::kOk ? "ok" : "zero_derivative";
}

void SensitivitySeries::push(double t, double value, NodeFlag flag) {
  times.push_back(t);
  delta_omega.push_back(flag == NodeFlag::kOk ? value : kInf);
  flags.push_back(flag);
}

double finite_difference_step(double Omega, double t_max, double N) {
  const double h = std::max(1e-6, 1e-4 * std::abs(Omega));
  if (!(t_max > 0.0)) return h;
  return std::min(h, kPhaseFraction / (t_max * (std::max(N, 0.0) + 1.0)));
}

Propagation propagate(double pi0, std::span<const double> plus,
                      std::span<const double> minus, double h) {
  if (!(h > 0.0)) throw DomainError("error propagation: h must be > 0");
  if (plus.empty() || plus.size() != minus.size())
    throw DomainError("error propagation: need matching +-h samples");
  if (!(pi0 > -kParitySlack && pi0 <= 1.0 + kParitySlack) || pi0 == 0.0) {
    std::ostringstream msg;
    msg << "error propagation: parity " << pi0 << " outside (0, 1]";
    throw NumericalConsistencyError(msg.str());
  }

  // Richardson tableau on the central differences D(h / 2^k).
  const std::size_t levels = plus.size();
  std::vector<double> prev(levels), cur(levels);
  double step = h;
  for (std::size_t k = 0; k < levels; ++k) {
    cur[0] = (plus[k] - minus[k]) / (2.0 * step);
    double factor = 4.0;
    for (std::size_t j = 1; j <= k; ++j) {
      cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (factor - 1.0);
      factor *= 4.0;
    }
    std::swap(prev, cur);
    step *= 0.5;
  }
  // prev now holds row levels-1; the best estimate is its diagonal entry.
  Propagation out;
  out.parity = pi0;
  out.derivative = prev[levels - 1];
  if (levels > 1) {
    const double lower = prev[levels - 2];
    const double scale = std::abs(out.derivative);
    out.richardson_change =
        scale > 0.0 ? std::abs(out.derivative - lower) / scale : 0.0;
  }
  const double p = std::min(pi0, 1.0);
  const double spread = 1.0 - p * p;
  if (spread < kFlatTop) {
    // Next to a maximum with parity 1 both sqrt(1 - Pi^2) and dPi vanish
    // linearly; their ratio tends to 1 / sqrt(-Pi'').
    const double curvature = second_derivative(pi0, plus, minus, h);
    if (curvature < 0.0) {
      out.delta_omega = 1.0 / std::sqrt(-curvature);
      return out;
    }
  }
  if (std::abs(out.derivative) < kZeroDerivative) {
    out.flag = NodeFlag::kZeroDerivative;
    out.delta_omega = kInf;
    return out;
  }
  out.delta_omega = std::sqrt(std::max(0.0, spread)) / std::abs(out.derivative);
  return out;
}

Propagation error_propagation(const std::function<double(double)>& pi_of_Omega,
                              double Omega, double h, int levels) {
  if (levels < 0) throw DomainError("error propagation: levels must be >= 0");
  std::vector<double> plus, minus;
  double step = h;
  for (int k = 0; k <= levels; ++k) {
    plus.push_back(pi_of_Omega(Omega + step));
    minus.push_back(pi_of_Omega(Omega - step));
    step *= 0.5;
  }
  return propagate(pi_of_Omega(Omega), plus, minus, h);
}

double markovian_sensitivity(double N, double kappa, double Omega, double t) {
  if (!(N > 0.0)) throw DomainError("markovian sensitivity: N must be > 0");
  if (!(kappa >= 0.0))
    throw DomainError("markovian sensitivity: kappa must be >= 0");
  if (!(t > 0.0)) throw DomainError("markovian sensitivity: t must be > 0");
  const double sine = std::sin(4.0 * Omega * t);
  if (std::abs(sine) < kStationarySine) return kInf;
  const double grow = std::exp(2.0 * kappa * t);
  const double c = 4.0 * grow + N - 2.0 + (N + 2.0) * std::cos(4.0 * Omega * t);
  const double num = (2.0 * grow + N * c / grow) * std::sqrt(std::max(c, 0.0));
  return num / (std::sqrt(8.0 * N) * (N + 2.0) * t * std::abs(sine));
}

SensitivitySeries ideal_series(double N, double Omega, const TimeGrid& grid) {
  SensitivitySeries out;
  out.provenance = Provenance::kIdeal;
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    const double t = grid.time(i);
    const double h = finite_difference_step(Omega, t, N);
    const auto p = error_propagation(
        [&](double o) { return ideal_parity(N, o, t); }, Omega, h);
    out.push(t, p.delta_omega, p.flag);
  }
  return out;
}

SensitivitySeries markovian_series(double N, double kappa, double Omega,
                                   const TimeGrid& grid) {
  SensitivitySeries out;
  out.provenance = Provenance::kMarkovian;
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    const double t = grid.time(i);
    const double v = markovian_sensitivity(N, kappa, Omega, t);
    out.push(t, v, std::isinf(v) ? NodeFlag::kZeroDerivative : NodeFlag::kOk);
  }
  return out;
}

ExactSensitivity exact_sensitivity(const SpectralDensity& J,
                                   const ProbeConfig& cfg, const TimeGrid& grid,
                                   const SolverOptions& options) {
  cfg.validate();
  const MemoryKernel kernel(J, grid, options);
  const double h = finite_difference_step(cfg.Omega, grid.t_max, cfg.photon_number());

  ExactSensitivity out;
  out.trajectory.grid = grid;
  out.trajectory.memory = kernel.report();

  auto mode1 = kernel.solve_mode(cfg.omega1());
  auto mode2 = kernel.solve_mode(cfg.omega2());
  const std::vector<double> pi0 = parity_track(mode1, mode2, cfg.r);
  out.trajectory.u1 = std::move(mode1.u);
  out.trajectory.du1 = std::move(mode1.du);
  out.trajectory.u2 = std::move(mode2.u);
  out.trajectory.du2 = std::move(mode2.du);

  constexpr std::size_t kLevels = kRichardsonLevels + 1;
  std::array<std::vector<double>, kLevels> plus, minus;
  double step = h;
  for (std::size_t k = 0; k < kLevels; ++k) {
    for (const double sign : {1.0, -1.0}) {
      const ProbeConfig shifted = cfg.with_Omega(cfg.Omega + sign * step);
      shifted.validate();
      const auto a = kernel.solve_mode(shifted.omega1());
      const auto b = kernel.solve_mode(shifted.omega2());
      (sign > 0 ? plus : minus)[k] = parity_track(a, b, cfg.r);
    }
    step *= 0.5;
  }

  out.series.provenance = Provenance::kExact;
  std::vector<double> changes;
  changes.reserve(grid.steps());
  std::array<double, kLevels> p{}, m{};
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    for (std::size_t k = 0; k < kLevels; ++k) {
      p[k] = plus[k][i];
      m[k] = minus[k][i];
    }
    const auto prop = propagate(pi0[i], p, m, h);
    out.series.push(grid.time(i), prop.delta_omega, prop.flag);
    if (prop.flag == NodeFlag::kOk) changes.push_back(prop.richardson_change);
  }
  if (!changes.empty()) {
    const auto mid = changes.begin() + changes.size() / 2;
    std::nth_element(changes.begin(), mid, changes.end());
    out.median_richardson_change = *mid;
    out.max_richardson_change = *std::max_element(changes.begin(), changes.end());
  }
  return out;
}

AsymptoticModel AsymptoticModel::build(const SpectralDensity& J,
                                       const ProbeConfig& cfg, double step) {
  if (!(step > 0.0)) throw DomainError("asymptotic model: step must be > 0");
  auto two_bound = [&](double Omega) {
    const RegimeReport report = classify(J, cfg.with_Omega(Omega));
    if (report.regime != Regime::kTwoBound) {
      std::ostringstream msg;
      msg << "asymptotic sensitivity requires two bound states; regime at "
             "Omega = "
          << Omega << " is " << to_string(report.regime);
      throw RegimeError(msg.str());
    }
    return report;
  };
  const RegimeReport here = two_bound(cfg.Omega);
  const RegimeReport up = two_bound(cfg.Omega + step);
  const RegimeReport down = two_bound(cfg.Omega - step);

  AsymptoticModel model;
  model.bound1 = *here.bound1;
  model.bound2 = *here.bound2;
  model.dZ1 = (up.bound1->weight - down.bound1->weight) / (2.0 * step);
  model.dZ2 = (up.bound2->weight - down.bound2->weight) / (2.0 * step);
  return model;
}

double asymptotic_sensitivity(const AsymptoticModel& model, double N,
                              double t) {
  if (!(N > 0.0)) throw DomainError("asymptotic sensitivity: N must be > 0");
  if (!(t >= 0.0)) throw DomainError("asymptotic sensitivity: t must be >= 0");
  const double z1 = model.bound1.weight;
  const double z2 = model.bound2.weight;
  const double z1s = z1 * z1;
  const double z2s = z2 * z2;
  const double g = model.bound1.energy - model.bound2.energy;

  const double f = 2.0 + N * (z1s * (2.0 - z1s) + z2s * (2.0 - z2s)) +
                   N * z1s * z2s * (N + (2.0 + N) * std::cos(2.0 * g * t));
  // d(Z1^2 + Z2^2 - 1)^2 and d ln(Z1 Z2) by the chain rule.
  const double d_square =
      4.0 * (z1s + z2s - 1.0) * (z1 * model.dZ1 + z2 * model.dZ2);
  const double d_log = model.dZ1 / z1 + model.dZ2 / z2;
  const double cg = std::cos(g * t);
  const double denom =
      d_square / (4.0 + 2.0 * N) +
      z1s * z2s * (t * (z1 + z2) * std::sin(2.0 * g * t) - 2.0 * d_log * cg * cg);
  if (std::abs(denom) < kZeroDerivative) return kInf;
  return f * std::sqrt(std::max(0.0, 2.0 * f - 4.0)) /
         (2.0 * N * (2.0 + N)) / std::abs(denom);
}

SensitivitySeries asymptotic_series(const AsymptoticModel& model, double N,
                                    const TimeGrid& grid) {
  SensitivitySeries out;
  out.provenance = Provenance::kAsymptotic;
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    const double t = grid.time(i);
    const double v = asymptotic_sensitivity(model, N, t);
    out.push(t, v, std::isinf(v) ? NodeFlag::kZeroDerivative : NodeFlag::kOk);
  }
  return out;
}

SensitivitySeries local_minima_envelope(const SensitivitySeries& series) {
  const std::size_t n = series.size();
  if (n < 3)
    throw DomainError("local minima envelope: need at least 3 nodes");
  auto value = [&](std::size_t i) {
    return series.flags[i] == NodeFlag::kOk ? series.delta_omega[i] : kInf;
  };
  SensitivitySeries out;
  out.provenance = series.provenance;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (series.flags[i] != NodeFlag::kOk) continue;
    const double v = value(i);
    if (v < value(i - 1) && v < value(i + 1))
      out.push(series.times[i], v, NodeFlag::kOk);
  }
  return out;
}

FitResult power_law_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 5)
    throw DomainError("power-law fit: need at least 5 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("power-law fit: points must be finite and positive");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  const double var = sxx / n - mx * mx;
  if (!(var > 0.0))
    throw DomainError("power-law fit: x values must not all coincide");
  FitResult fit;
  fit.points = points.size();
  fit.exponent = (sxy / n - mx * my) / var;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - intercept - fit.exponent * std::log(x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace qog
