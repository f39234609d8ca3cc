#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qog/errors.hpp"
#include "qog/probe.hpp"
#include "qog/sensitivity.hpp"
#include "qog/volterra.hpp"

namespace {

using qog::NodeFlag;
using qog::ProbeConfig;
using qog::SensitivitySeries;
using qog::SpectralDensity;
using qog::TimeGrid;
using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

double r_of(double N) { return qog::squeezing_from_photon_number(N); }

SensitivitySeries envelope_within(const SensitivitySeries& s, double lo, double hi) {
  const auto env = qog::local_minima_envelope(s);
  SensitivitySeries out;
  for (std::size_t i = 0; i < env.size(); ++i)
    if (env.times[i] >= lo && env.times[i] <= hi)
      out.push(env.times[i], env.delta_omega[i], env.flags[i]);
  return out;
}

double minimum(const SensitivitySeries& s) {
  return *std::min_element(s.delta_omega.begin(), s.delta_omega.end());
}

TEST(ErrorPropagation, IdealOptimumAtQuarterPeriods) {
  const double N = 100, Omega = 0.01;
  for (const int n : {0, 1, 2, 5}) {
    const double t = (2 * n + 1) * kPi / (4 * Omega);
    const auto p = qog::error_propagation(
        [&](double o) { return qog::ideal_parity(N, o, t); }, Omega,
        qog::finite_difference_step(Omega, t, N));
    EXPECT_EQ(p.flag, NodeFlag::kOk);
    EXPECT_NEAR(p.delta_omega, 1 / (2 * t * std::sqrt(10200.0)), 1e-8 * p.delta_omega);
    EXPECT_NEAR(p.delta_omega * t, 4.9507e-3, 1e-7);
  }
}

TEST(ErrorPropagation, StationaryPointIsFlagged) {
  const double N = 100, Omega = 0.01, t = kPi / (2 * Omega);
  const auto p = qog::error_propagation(
      [&](double o) { return qog::ideal_parity(N, o, t); }, Omega,
      qog::finite_difference_step(Omega));
  EXPECT_EQ(p.flag, NodeFlag::kZeroDerivative);
  EXPECT_TRUE(std::isinf(p.delta_omega));
}

TEST(ErrorPropagation, Preconditions) {
  auto pi = [](double) { return 0.5; };
  EXPECT_THROW(qog::error_propagation(pi, 0.01, 0.0), qog::DomainError);
  EXPECT_THROW(qog::error_propagation([](double) { return 1.5; }, 0.01, 1e-6),
               qog::NumericalConsistencyError);
  EXPECT_DOUBLE_EQ(qog::finite_difference_step(0.01), 1e-6);
  EXPECT_EQ(qog::finite_difference_step(1.0), 1e-4);
  EXPECT_EQ(qog::finite_difference_step(1.0, 1.0, 0.0), 1e-4);
  EXPECT_DOUBLE_EQ(qog::finite_difference_step(0.01, 500, 99), 1e-2 / (500 * 100));
}

TEST(IdealSeries, MatchesClosedForm) {
  const TimeGrid grid(300, 0.05);
  for (const double N : {1.0, 100.0, 800.0})
    for (const double Omega : {0.01, 0.02}) {
      const auto s = qog::ideal_series(N, Omega, grid);
      ASSERT_EQ(s.size(), grid.steps());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(std::sin(2 * Omega * s.times[i])) < 0.05) continue;
        const double want = oracle::ideal_delta_omega(N, Omega, s.times[i]);
        EXPECT_NEAR(s.delta_omega[i], want, 1e-6 * want) << "t=" << s.times[i];
      }
    }
}

TEST(Markovian, ZeroDecayReducesToIdeal) {
  for (const double N : {1.0, 10.0, 100.0, 1000.0})
    for (const double Omega : {0.01, 0.1, 1.0})
      for (const double t : {0.3, 7.0, 51.0, 333.0}) {
        const double v = qog::markovian_sensitivity(N, 0.0, Omega, t);
        const double want = oracle::ideal_delta_omega(N, Omega, t);
        EXPECT_NEAR(v, want, 1e-10 * want) << N << " " << Omega << " " << t;
      }
}

TEST(Markovian, PhotonNumberResolutionMatchesErrorPropagation) {
  // The closed form with n -> N against error propagation on the Gaussian
  // parity of u_l = exp(-(kappa + i w_l) t).
  for (const double N : {10.0, 100.0, 400.0})
    for (const double kappa : {0.05, 0.2})
      for (const double t : {0.7, 3.1, 9.9, 24.2}) {
        const double Omega = 1.0;
        if (std::abs(std::sin(4 * Omega * t)) < 0.05) continue;
        auto pi = [&](oracle::ld o) {
          using C = std::complex<oracle::ld>;
          const C u1 = std::exp(C(-kappa * t, -(1 + o) * t));
          const C u2 = std::exp(C(-kappa * t, -(1 - o) * t));
          return oracle::gaussian_parity_ld(u1, u2, r_of(N));
        };
        const double want = oracle::propagate(pi, Omega, 1e-4);
        const double got = qog::markovian_sensitivity(N, kappa, Omega, t);
        EXPECT_NEAR(got, want, 1e-8 * want) << N << " " << kappa << " " << t;
      }
}

TEST(Markovian, FlagsAndDomain) {
  EXPECT_TRUE(std::isinf(qog::markovian_sensitivity(100, 0.2, 1.0, kPi / 4)));
  EXPECT_THROW(qog::markovian_sensitivity(0, 0.2, 1, 1), qog::DomainError);
  EXPECT_THROW(qog::markovian_sensitivity(100, -0.2, 1, 1), qog::DomainError);
  EXPECT_THROW(qog::markovian_sensitivity(100, 0.2, 1, 0), qog::DomainError);
}

TEST(Markovian, EnvelopeIsUShapedAndDiverges) {
  const double kappa = 0.2;
  const auto s = qog::markovian_series(100, kappa, 1.0, TimeGrid(10 / kappa, 5e-4));
  const auto env = qog::local_minima_envelope(s);
  ASSERT_GT(env.size(), 20u);
  const auto it = std::min_element(env.delta_omega.begin(), env.delta_omega.end());
  const auto k = static_cast<std::size_t>(it - env.delta_omega.begin());
  EXPECT_GT(k, 0u);
  EXPECT_LT(k, env.size() - 1);
  EXPECT_GT(env.delta_omega.front(), 1.5 * *it);
  EXPECT_GT(env.delta_omega.back(), 10 * *it);
  EXPECT_NEAR(*it, 5.4 * kappa * std::pow(100.0, -0.23), 0.1 * 5.4 * kappa * std::pow(100.0, -0.23));
  // Around t = 40 / kappa the envelope is far above its minimum.
  const auto late = qog::markovian_series(100, kappa, 1.0, TimeGrid(40 / kappa + 1, 5e-4));
  const auto late_env = envelope_within(late, 40 / kappa - 1, 40 / kappa + 1);
  ASSERT_GT(late_env.size(), 0u);
  EXPECT_GT(minimum(late_env), 10 * *it);
}

TEST(Markovian, GlobalMinimumScalingWithPhotonNumber) {
  const double kappa = 0.2;
  std::vector<std::pair<double, double>> points;
  for (const double N : {25.0, 50.0, 100.0, 200.0, 400.0, 800.0}) {
    const auto s = qog::markovian_series(N, kappa, 1.0, TimeGrid(10 / kappa, 5e-4));
    points.emplace_back(N, minimum(qog::local_minima_envelope(s)));
  }
  const auto fit = qog::power_law_fit(points);
  EXPECT_NEAR(fit.exponent, -0.23, 0.05);
  EXPECT_NEAR(fit.prefactor / kappa, 5.4, 0.8);
  EXPECT_EQ(fit.points, 6u);
}

TEST(Exact, DecoupledAgreesWithAllPipelines) {
  const SpectralDensity J(0, 25, 1);
  const TimeGrid grid(100, 1e-2);
  for (const double Omega : {0.01, 0.013}) {
    const auto cfg = ProbeConfig::from_photon_number(Omega, 100);
    const auto exact = qog::exact_sensitivity(J, cfg, grid);
    const auto ideal = qog::ideal_series(100, Omega, grid);
    const auto markov = qog::markovian_series(100, 0.0, Omega, grid);
    qog::AsymptoticModel lossless;
    lossless.bound1 = {cfg.omega1(), 1.0};
    lossless.bound2 = {cfg.omega2(), 1.0};
    const auto asym = qog::asymptotic_series(lossless, 100, grid);
    for (std::size_t i = 0; i < exact.series.size(); ++i) {
      const double t = grid.time(i + 1);
      if (std::abs(std::sin(2 * Omega * t)) < 0.05) continue;
      const double want = oracle::ideal_delta_omega(100, Omega, t);
      EXPECT_NEAR(exact.series.delta_omega[i], want, 1e-6 * want) << "t=" << t;
      EXPECT_NEAR(ideal.delta_omega[i], want, 1e-6 * want) << "t=" << t;
      EXPECT_NEAR(markov.delta_omega[i], want, 1e-6 * want) << "t=" << t;
      EXPECT_NEAR(asym.delta_omega[i], want, 1e-6 * want) << "t=" << t;
    }
  }
}

TEST(Exact, InvariantUnderModeLabelSwap) {
  const SpectralDensity J(0.05, 25, 1);
  const TimeGrid grid(20, 2e-3);
  const auto a = qog::exact_sensitivity(J, ProbeConfig::from_photon_number(0.01, 100), grid);
  const auto b = qog::exact_sensitivity(J, ProbeConfig::from_photon_number(-0.01, 100), grid);
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    EXPECT_EQ(a.series.flags[i], b.series.flags[i]);
    if (a.series.flags[i] == NodeFlag::kOk) {
      EXPECT_NEAR(a.series.delta_omega[i], b.series.delta_omega[i],
                  1e-9 * a.series.delta_omega[i]);
    }
  }
}

TEST(Exact, HalvingTheStepBarelyMovesTheSensitivity) {
  // Plain central differences at h and h / 2 on the exact parity signal.
  const SpectralDensity J(0.05, 25, 1);
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const TimeGrid grid(200, qog::default_dt(J, cfg));
  const qog::MemoryKernel kernel(J, grid);
  auto parity = [&](double Omega) {
    const auto c = cfg.with_Omega(Omega);
    const auto a = kernel.solve_mode(c.omega1());
    const auto b = kernel.solve_mode(c.omega2());
    std::vector<double> out(a.u.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = qog::parity_expectation({a.u[i], b.u[i], cfg.r});
    return out;
  };
  const double h = qog::finite_difference_step(0.01);
  const auto p0 = parity(0.01);
  const auto p1 = parity(0.01 + h), m1 = parity(0.01 - h);
  const auto p2 = parity(0.01 + h / 2), m2 = parity(0.01 - h / 2);
  double max_d = 0;
  for (std::size_t i = 1; i < p0.size(); ++i)
    max_d = std::max(max_d, std::abs(p1[i] - m1[i]) / (2 * h));
  std::size_t checked = 0;
  for (std::size_t i = 1; i < p0.size(); ++i) {
    const std::array<double, 1> a1{p1[i]}, b1{m1[i]}, a2{p2[i]}, b2{m2[i]};
    const auto coarse = qog::propagate(p0[i], a1, b1, h);
    const auto fine = qog::propagate(p0[i], a2, b2, h / 2);
    if (std::abs(coarse.derivative) < 1e-3 * max_d) continue;
    ++checked;
    EXPECT_LT(std::abs(fine.delta_omega - coarse.delta_omega), 1e-4 * coarse.delta_omega)
        << "t=" << grid.time(i);
  }
  EXPECT_GT(checked, p0.size() * 85 / 100);
}

TEST(Exact, ReportsRichardsonAgreement) {
  const SpectralDensity J(0.05, 25, 1);
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const auto out = qog::exact_sensitivity(J, cfg, TimeGrid(100, qog::default_dt(J, cfg)));
  EXPECT_LT(out.median_richardson_change, 1e-6);
  EXPECT_GE(out.max_richardson_change, out.median_richardson_change);
  EXPECT_EQ(out.series.provenance, qog::Provenance::kExact);
  for (std::size_t i = 0; i < out.series.size(); ++i)
    if (out.series.flags[i] == NodeFlag::kOk) {
      EXPECT_GE(out.series.delta_omega[i], 0.0);
    }
}

TEST(Asymptotic, LosslessLimitIsIdeal) {
  for (const double N : {1.0, 100.0, 1000.0})
    for (const double Omega : {0.01, 0.05, 0.3})
      for (const double t : {3.0, 47.0, 1234.5}) {
        if (std::abs(std::sin(2 * Omega * t)) < 1e-3) continue;
        qog::AsymptoticModel m;
        m.bound1 = {1 + Omega, 1.0};
        m.bound2 = {1 - Omega, 1.0};
        const double want = oracle::ideal_delta_omega(N, Omega, t);
        EXPECT_NEAR(qog::asymptotic_sensitivity(m, N, t), want, 1e-10 * want)
            << N << " " << Omega << " " << t;
      }
}

TEST(Asymptotic, MatchesErrorPropagationOnBoundStateAmplitudes) {
  // u_l = Z_l(Omega) exp(-i E_l(Omega) t) with dE_1 = Z_1, dE_2 = -Z_2 and
  // linear Z_l(Omega).
  struct Case {
    double Z1, Z2, dZ1, dZ2, E1, E2;
  };
  for (const auto c : {Case{0.857, 0.860, -0.1497, 0.1385, -0.1975, -0.2147},
                       Case{0.5, 0.7, 0.3, -0.2, -1.0, -1.3},
                       Case{0.95, 0.93, 0.0, 0.0, 0.2, 0.1}})
    for (const double N : {10.0, 100.0})
      for (const double t : {5.0, 61.0, 480.0}) {
        const double Omega = 0.01;
        auto pi = [&](double o) {
          const double d = o - Omega;
          const double z1 = c.Z1 + c.dZ1 * d, z2 = c.Z2 + c.dZ2 * d;
          const double e1 = c.E1 + c.Z1 * d, e2 = c.E2 - c.Z2 * d;
          return oracle::gaussian_parity(std::polar(z1, -e1 * t), std::polar(z2, -e2 * t),
                                         r_of(N));
        };
        qog::AsymptoticModel m;
        m.bound1 = {c.E1, c.Z1};
        m.bound2 = {c.E2, c.Z2};
        m.dZ1 = c.dZ1;
        m.dZ2 = c.dZ2;
        // The phases move by t h, so the stencil step shrinks with t.
        const double want = oracle::propagate(pi, Omega, std::min(1e-4, 1e-3 / t));
        EXPECT_NEAR(qog::asymptotic_sensitivity(m, N, t), want, 1e-6 * want)
            << "Z1=" << c.Z1 << " N=" << N << " t=" << t;
      }
}

TEST(Asymptotic, BuildUsesSpectrumAndRequiresBinding) {
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const auto m = qog::AsymptoticModel::build(SpectralDensity(0.05, 25, 1), cfg);
  EXPECT_NEAR(m.bound1.weight, 0.85691567500318988, 1e-9);
  EXPECT_NEAR(m.dZ1, -0.149691, 1e-5);
  EXPECT_NEAR(m.dZ2, 0.138536, 1e-5);
  EXPECT_THROW(qog::AsymptoticModel::build(SpectralDensity(0.05, 2, 1), cfg),
               qog::RegimeError);
  EXPECT_THROW(qog::AsymptoticModel::build(SpectralDensity(0.05, 20, 1), cfg),
               qog::RegimeError);
}

TEST(Asymptotic, EnvelopeScalesAsInverseTime) {
  const auto cfg = ProbeConfig::from_photon_number(0.01, 100);
  const auto m = qog::AsymptoticModel::build(SpectralDensity(0.05, 25, 1), cfg);
  const double T = 1000;
  const auto s = qog::asymptotic_series(m, 100, TimeGrid(4 * T, 0.01));
  const auto env = envelope_within(s, T, 4 * T);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < env.size(); ++i) pts.emplace_back(env.times[i], env.delta_omega[i]);
  const auto fit = qog::power_law_fit(pts);
  EXPECT_NEAR(fit.exponent, -1.0, 0.05);
}

TEST(Envelope, MonotoneSeriesHasNoMinimum) {
  SensitivitySeries s;
  for (int i = 1; i <= 10; ++i) s.push(i, 1.0 / i, NodeFlag::kOk);
  EXPECT_EQ(qog::local_minima_envelope(s).size(), 0u);
}

TEST(Envelope, FlaggedNodesAreSkipped) {
  SensitivitySeries s;
  s.push(1, 3, NodeFlag::kOk);
  s.push(2, 2, NodeFlag::kOk);
  s.push(3, 0, NodeFlag::kZeroDerivative);
  s.push(4, 2.5, NodeFlag::kOk);
  s.push(5, 1, NodeFlag::kOk);
  s.push(6, 4, NodeFlag::kOk);
  const auto env = qog::local_minima_envelope(s);
  ASSERT_EQ(env.size(), 2u);
  EXPECT_EQ(env.times[0], 2.0);
  EXPECT_EQ(env.times[1], 5.0);
  SensitivitySeries tiny;
  tiny.push(1, 1, NodeFlag::kOk);
  tiny.push(2, 0.5, NodeFlag::kOk);
  EXPECT_THROW(qog::local_minima_envelope(tiny), qog::DomainError);
}

TEST(Envelope, IdealMinimaAtOddQuarterPeriods) {
  const double Omega = 0.01, dt = 0.01;
  const auto env = qog::local_minima_envelope(qog::ideal_series(100, Omega, TimeGrid(500, dt)));
  ASSERT_EQ(env.size(), 3u);
  for (std::size_t n = 0; n < env.size(); ++n)
    EXPECT_NEAR(env.times[n], (2 * n + 1) * kPi / (4 * Omega), dt);
}

TEST(PowerLawFit, ExactLaw) {
  std::vector<std::pair<double, double>> pts;
  for (const double x : {1.0, 2.0, 5.0, 10.0, 40.0, 100.0}) pts.emplace_back(x, 3 / std::sqrt(x));
  const auto fit = qog::power_law_fit(pts);
  EXPECT_NEAR(fit.prefactor, 3.0, 1e-12);
  EXPECT_NEAR(fit.exponent, -0.5, 1e-12);
  EXPECT_LT(fit.residual, 1e-12);
}

TEST(PowerLawFit, Preconditions) {
  std::vector<std::pair<double, double>> four{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  EXPECT_THROW(qog::power_law_fit(four), qog::DomainError);
  auto bad = four;
  bad.emplace_back(5, -1);
  EXPECT_THROW(qog::power_law_fit(bad), qog::DomainError);
}

TEST(PowerLawFit, IdealMinimumApproachesInverseN) {
  std::vector<std::pair<double, double>> pts;
  const double t = 100;
  for (const double N : {1e3, 3e3, 1e4, 3e4, 1e5})
    pts.emplace_back(N, 1 / (2 * t * std::sqrt(N * (N + 2))));
  EXPECT_NEAR(qog::power_law_fit(pts).exponent, -1.0, 1e-3);
}

}  // namespace
