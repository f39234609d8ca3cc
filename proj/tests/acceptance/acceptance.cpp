// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qog/app.hpp"
#include "qog/probe.hpp"
#include "qog/sensitivity.hpp"
#include "qog/spectral.hpp"
#include "qog/spectrum.hpp"
#include "qog/volterra.hpp"

namespace {

using cd = std::complex<double>;
using qog::Frequency;
using qog::ProbeConfig;
using qog::SpectralDensity;
using qog::TimeGrid;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::size_t nearest_node(const qog::SensitivitySeries& s, double t) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s.times[i] - t) < std::abs(s.times[best] - t)) best = i;
  return best;
}

Outcome ideal_limit() {
  Outcome o;
  const double N = 100, Omega = 0.01;
  const auto cfg = ProbeConfig::from_photon_number(Omega, N);
  const auto out = qog::exact_sensitivity(SpectralDensity(0, 25, 1), cfg, TimeGrid(100, 1e-3));
  const std::size_t i = nearest_node(out.series, kPi / (4 * Omega));
  const double t = out.series.times[i];
  const double want = 1 / (2 * t * std::sqrt(N * (N + 2)));
  const double err = rel(out.series.delta_omega[i], want);
  o.note(fmt("t=%.3f rel_err=%.2e", t, err));
  o.require(err < 1e-6, "relative error below 1e-6");
  return o;
}

Outcome ideal_parity_grid() {
  Outcome o;
  double worst = 0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      for (int c = 0; c < 10; ++c) {
        const double N = std::pow(10.0, -1 + 0.5 * a);
        const double Omega = 1e-3 * std::pow(10.0, 0.27 * b);
        const double t = 0.37 + 23.9 * c;
        const auto cfg = ProbeConfig::from_photon_number(Omega, N);
        const cd u1 = std::exp(cd(0, -cfg.omega1() * t));
        const cd u2 = std::exp(cd(0, -cfg.omega2() * t));
        const double got = qog::parity_expectation({u1, u2, cfg.r});
        const double c2 = std::cos(2 * Omega * t);
        const double want = 1 / std::sqrt(1 + N * (2 + N) * c2 * c2);
        worst = std::max(worst, std::abs(got - want));
      }
  o.note(fmt("max_abs_err=%.2e", worst));
  o.require(worst < 1e-12, "closed form to 1e-12");
  return o;
}

Outcome markovian_no_go() {
  Outcome o;
  const double N = 100, Omega = 1, kappa = 0.2;
  double worst = 0;
  for (const double t : {0.7, 3.1, 9.9, 14.6, 24.2}) {
    auto pi = [&](oracle::ld w) {
      using C = std::complex<oracle::ld>;
      const C u1 = std::exp(C(-kappa * t, -(1 + w) * t));
      const C u2 = std::exp(C(-kappa * t, -(1 - w) * t));
      return oracle::gaussian_parity_ld(u1, u2, qog::squeezing_from_photon_number(N));
    };
    const double want = oracle::propagate(pi, Omega, 1e-4);
    worst = std::max(worst, rel(qog::markovian_sensitivity(N, kappa, Omega, t), want));
  }
  o.note(fmt("n_to_N_rel_err=%.2e", worst));
  o.require(worst < 1e-8, "photon-number resolution matches error propagation");

  const auto env = qog::local_minima_envelope(
      qog::markovian_series(N, kappa, Omega, TimeGrid(50, 5e-4)));
  o.require(env.size() > 10, "envelope has minima");
  if (env.size() <= 10) return o;
  const auto it = std::min_element(env.delta_omega.begin(), env.delta_omega.end());
  const std::size_t k = static_cast<std::size_t>(it - env.delta_omega.begin());
  const double minimum = *it;
  o.note(fmt("min=%.5f at t=%.2f", minimum, env.times[k]));
  o.require(k > 0 && k + 1 < env.size(), "minimum is interior");
  o.require(env.delta_omega.front() > 2 * minimum && env.delta_omega.back() > 2 * minimum,
            "envelope rises on both sides");
  bool down = true, up = true;
  for (std::size_t i = 1; i <= k; ++i) down = down && env.delta_omega[i] <= env.delta_omega[i - 1];
  for (std::size_t i = k + 1; i < env.size(); ++i) up = up && env.delta_omega[i] >= env.delta_omega[i - 1];
  o.require(down && up, "U-shaped");
  const double law = 5.4 * kappa * std::pow(N, -0.23);
  o.note(fmt("law=%.5f rel=%.3f", law, rel(minimum, law)));
  o.require(rel(minimum, law) < 0.10, "minimum within 10% of 5.4 kappa N^-0.23");
  return o;
}

double parse_key(const std::string& report, const std::string& key) {
  const auto at = report.find(key + "=");
  if (at == std::string::npos) return std::nan("");
  return std::stod(report.substr(at + key.size() + 1));
}

Outcome thresholds() {
  Outcome o;
  qog::app::SpectrumArgs args;
  args.eta = 0.05;
  args.s = 1;
  args.Omega = 1e-2;
  const auto report = qog::app::spectrum_report(args);
  const double t1 = parse_key(report, "threshold_omega_c_1");
  const double t2 = parse_key(report, "threshold_omega_c_2");
  const double want1 = (1 + 1e-2) / (0.05 * std::tgamma(1.0));
  const double want2 = (1 - 1e-2) / (0.05 * std::tgamma(1.0));
  o.note(fmt("thresholds=%.17g,%.17g", t1, t2));
  o.require(t1 == want1 && t2 == want2, "closed form reproduced exactly");
  o.require(std::abs(t1 - 20.2) < 1e-12 && std::abs(t2 - 19.8) < 1e-12, "values 20.2 and 19.8");
  const ProbeConfig cfg = ProbeConfig::from_photon_number(1e-2, 100);
  o.require(qog::classify(SpectralDensity(0.05, 19.79, 1), cfg).regime == qog::Regime::kNone &&
                qog::classify(SpectralDensity(0.05, 19.81, 1), cfg).regime ==
                    qog::Regime::kOneBound &&
                qog::classify(SpectralDensity(0.05, 20.21, 1), cfg).regime ==
                    qog::Regime::kTwoBound,
            "regime boundaries");
  return o;
}

Outcome plateau() {
  Outcome o;
  const SpectralDensity J(0.05, 25, 1);
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const auto report = qog::classify(J, cfg);
  o.require(report.regime == qog::Regime::kTwoBound, "two bound states");
  if (!report.bound1 || !report.bound2) return o;
  const auto traj = qog::solve(J, cfg, TimeGrid(500, qog::default_dt(J, cfg)));
  const double a1 = std::abs(traj.u1.back()), a2 = std::abs(traj.u2.back());
  const double e1 = rel(a1, report.bound1->weight), e2 = rel(a2, report.bound2->weight);
  o.note(fmt("|u1|=%.5f Z1=%.5f", a1, report.bound1->weight));
  o.note(fmt("|u2|=%.5f Z2=%.5f", a2, report.bound2->weight));
  o.require(e1 < 0.02 && e2 < 0.02, "|u_l(500)| within 2% of Z_l");
  return o;
}

Outcome asymptotic_agreement() {
  Outcome o;
  const SpectralDensity J(0.05, 25, 1);
  const double N = 100;
  const auto cfg = ProbeConfig::from_photon_number(0.01, N);
  const auto exact = qog::exact_sensitivity(J, cfg, TimeGrid(500, qog::default_dt(J, cfg)));
  const auto model = qog::AsymptoticModel::build(J, cfg);
  const auto env = qog::local_minima_envelope(exact.series);
  double worst = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env.times[i] < 375) continue;
    worst = std::max(worst, rel(env.delta_omega[i], qog::asymptotic_sensitivity(model, N, env.times[i])));
    ++count;
  }
  o.note(fmt("minima=%.0f max_rel_dev=%.2e", static_cast<double>(count), worst));
  o.require(count > 0, "envelope points in the final quarter");
  o.require(worst < 0.10, "within 10% of the asymptotic formula");
  return o;
}

Outcome inverse_time() {
  Outcome o;
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const auto model = qog::AsymptoticModel::build(SpectralDensity(0.05, 25, 1), cfg);
  const auto env = qog::local_minima_envelope(
      qog::asymptotic_series(model, 100, TimeGrid(1e4, 0.01)));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < env.size(); ++i)
    if (env.times[i] >= 1e3) pts.emplace_back(env.times[i], env.delta_omega[i]);
  o.require(pts.size() >= 2, "envelope points");
  if (pts.size() < 2) return o;
  const auto fit = qog::power_law_fit(pts);
  o.note(fmt("exponent=%.4f points=%.0f", fit.exponent, static_cast<double>(fit.points)));
  o.require(std::abs(fit.exponent + 1) < 0.05, "exponent -1 +- 0.05");
  return o;
}

Outcome properties() {
  Outcome o;
  {
    const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
    const auto traj = qog::solve(SpectralDensity(0, 25, 1), cfg, TimeGrid(200, 1e-2));
    double worst = 0;
    for (std::size_t i = 0; i < traj.u1.size(); ++i)
      worst = std::max({worst, std::abs(std::abs(traj.u1[i]) - 1), std::abs(std::abs(traj.u2[i]) - 1)});
    o.note(fmt("unitarity=%.1e", worst));
    o.require(worst < 1e-8, "zero-coupling unitarity");
  }
  {
    double worst_completeness = 0, worst_residual = 0, worst_gradient = 0;
    for (const double wc : {25.0, 40.0, 100.0})
      for (const double s : {1.0, 2.0}) {
        const SpectralDensity J(0.05, wc, s);
        const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
        for (const double w : {cfg.omega1(), cfg.omega2()}) {
          const auto b = qog::find_bound_state(J, Frequency(w));
          if (!b) continue;
          worst_completeness = std::max(worst_completeness,
              std::abs(b->weight + qog::branch_cut_weight(J, Frequency(w)) - 1));
          worst_residual = std::max(worst_residual,
              std::abs(qog::self_energy(J, Frequency(w), b->energy) - b->energy));
        }
        if (qog::classify(J, cfg).regime != qog::Regime::kTwoBound) continue;
        const auto [g1, g2] = qog::bound_state_gradient(J, cfg);
        const double h = 1e-5;
        auto energy = [&](double Omega, bool first) {
          const auto c = cfg.with_Omega(Omega);
          return qog::find_bound_state(J, Frequency(first ? c.omega1() : c.omega2()))->energy;
        };
        const double fd1 = (energy(0.01 + h, true) - energy(0.01 - h, true)) / (2 * h);
        const double fd2 = (energy(0.01 + h, false) - energy(0.01 - h, false)) / (2 * h);
        worst_gradient = std::max({worst_gradient, rel(g1, fd1), rel(g2, fd2)});
      }
    o.note(fmt("completeness=%.1e residual=%.1e", worst_completeness, worst_residual));
    o.note(fmt("gradient=%.1e", worst_gradient));
    o.require(worst_completeness < 1e-4, "completeness");
    o.require(worst_residual < 1e-10, "root residual");
    o.require(worst_gradient < 1e-4, "bound-energy gradient");
  }
  {
    double worst = 0;
    for (const double N : {1.0, 100.0, 1000.0})
      for (const double Omega : {0.01, 0.05, 0.3})
        for (const double t : {3.0, 47.0, 1234.5}) {
          qog::AsymptoticModel m;
          m.bound1 = {1 + Omega, 1.0};
          m.bound2 = {1 - Omega, 1.0};
          worst = std::max(worst, rel(qog::asymptotic_sensitivity(m, N, t),
                                      oracle::ideal_delta_omega(N, Omega, t)));
        }
    o.note(fmt("lossless=%.1e", worst));
    o.require(worst < 1e-10, "asymptotic formula reduces to ideal");
  }
  {
    double worst = 0;
    for (const double wc : {2.0, 25.0, 400.0})
      for (const double s : {0.5, 1.0, 2.0})
        for (const double x : {0.0, 1e-3, 0.1, 1.0, 10.0, 100.0}) {
          const SpectralDensity J(0.05, wc, s);
          const cd want = oracle::kernel(0.05, wc, s, x);
          worst = std::max(worst, std::abs(J.kernel(x) - want) / std::abs(want));
        }
    o.note(fmt("kernel=%.1e", worst));
    o.require(worst < 1e-8, "kernel closed form vs quadrature");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "ideal super-Heisenberg limit", 1, ideal_limit},
      {2, "ideal parity closed form", 1, ideal_parity_grid},
      {3, "Markovian no-go reproduction", 10, markovian_no_go},
      {4, "bound-state thresholds", 0.1, thresholds},
      {5, "steady-state plateau", 60, plateau},
      {6, "asymptotic agreement", 300, asymptotic_agreement},
      {7, "inverse-time recovery", 10, inverse_time},
      {8, "property suite", 30, properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.note(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(seconds < c.budget_seconds, fmt("runtime under %gs", c.budget_seconds));
    if (!out.pass) ++failures;
    std::printf("%s %d %s (%.2fs): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
