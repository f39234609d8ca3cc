#include "qog/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "qog/errors.hpp"
#include "qog/output.hpp"
#include "qog/probe_config.hpp"
#include "qog/spectral.hpp"
#include "qog/spectrum.hpp"
#include "qog/volterra.hpp"

namespace qog::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Non-exact pipelines are cheap closed forms; this many steps resolves the
// fastest oscillation of the shipped scenarios.
constexpr double kDefaultSteps = 1e5;

using Report = std::vector<std::pair<std::string, std::string>>;

struct Computation {
  SensitivitySeries series;
  std::optional<Trajectory> trajectory;
  Report report;
};

SpectralDensity spectral_of(const Scenario& sc) {
  return SpectralDensity(*sc.eta, *sc.omega_c, sc.s);
}

ProbeConfig probe_of(const Scenario& sc) {
  ProbeConfig cfg = ProbeConfig::from_squeezing(sc.Omega, sc.squeezing(),
                                                sc.omega0);
  cfg.validate();
  return cfg;
}

void add(Report& report, const std::string& key, double v) {
  report.emplace_back(key, output::scalar(v));
}

void add_regime(Report& report, const RegimeReport& regime) {
  std::istringstream lines(format_report(regime));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    report.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
}

Computation compute(const Scenario& sc, bool full_report) {
  sc.validate();
  const double dt = resolved_dt(sc);
  const TimeGrid grid(sc.t_max, dt);
  if (grid.steps() < 3)
    throw DomainError("scenario: grid needs at least 3 steps");
  const double N = sc.photon_number();

  Computation out;
  add(out.report, "dt", dt);
  add(out.report, "steps", static_cast<double>(grid.steps()));
  add(out.report, "N", N);
  add(out.report, "r", sc.squeezing());

  switch (sc.pipeline) {
    case Pipeline::kIdeal:
      out.series = ideal_series(N, sc.Omega, grid);
      break;
    case Pipeline::kMarkovian: {
      const double kappa =
          sc.kappa ? *sc.kappa
                   : spectral_of(sc).decay_rate(Frequency(sc.omega0));
      add(out.report, "kappa", kappa);
      out.report.emplace_back("kappa_source",
                              sc.kappa ? "override" : "pi*J(omega0)");
      out.series = markovian_series(N, kappa, sc.Omega, grid);
      break;
    }
    case Pipeline::kExact: {
      const SpectralDensity J = spectral_of(sc);
      const ProbeConfig cfg = probe_of(sc);
      auto exact = exact_sensitivity(J, cfg, grid);
      const auto& mem = exact.trajectory.memory;
      out.report.emplace_back("memory_scheme",
                              mem.scheme == MemoryScheme::kExponentialSum
                                  ? "exponential_sum"
                                  : "direct");
      add(out.report, "memory_depth", static_cast<double>(mem.depth));
      add(out.report, "memory_error_estimate", mem.error_estimate);
      add(out.report, "richardson_median_change",
          exact.median_richardson_change);
      add(out.report, "richardson_max_change", exact.max_richardson_change);
      if (full_report) {
        if (2.0 * dt <= sc.t_max)
          add(out.report, "grid_relative_change",
              grid_change_estimate(J, cfg, exact.trajectory));
        add_regime(out.report, classify(J, cfg));
      }
      out.series = std::move(exact.series);
      out.trajectory = std::move(exact.trajectory);
      break;
    }
    case Pipeline::kAsymptotic: {
      const SpectralDensity J = spectral_of(sc);
      const ProbeConfig cfg = probe_of(sc);
      const auto model = AsymptoticModel::build(J, cfg);
      add(out.report, "dZ1_dOmega", model.dZ1);
      add(out.report, "dZ2_dOmega", model.dZ2);
      if (full_report) add_regime(out.report, classify(J, cfg));
      out.series = asymptotic_series(model, N, grid);
      break;
    }
  }
  return out;
}

SensitivitySeries envelope_after(const SensitivitySeries& series,
                                 double t_min) {
  const SensitivitySeries env = local_minima_envelope(series);
  SensitivitySeries out;
  out.provenance = env.provenance;
  for (std::size_t i = 0; i < env.size(); ++i)
    if (env.times[i] >= t_min)
      out.push(env.times[i], env.delta_omega[i], env.flags[i]);
  return out;
}

std::vector<std::string> requested_series(const Scenario& sc) {
  if (!sc.series.empty()) return sc.series;
  if (sc.pipeline == Pipeline::kExact)
    return {"sensitivity", "envelope", "trajectory"};
  return {"sensitivity", "envelope"};
}

std::string sidecar(const Scenario& resolved, const std::vector<OutputFile>& files,
                    const Report& report) {
  std::ostringstream out;
  out << "# Metadata sidecar; can be passed back to `qog run`.\n";
  out << to_text(resolved);
  out << "\n[meta]\n";
  out << "tool=qog\n";
  out << "version=" << kVersion << '\n';
  out << "files=";
  for (std::size_t i = 0; i < files.size(); ++i)
    out << (i ? "," : "") << files[i].name;
  out << "\n\n[report]\n";
  for (const auto& [k, v] : report) out << k << '=' << v << '\n';
  return out.str();
}

}  // namespace

Scenario apply_overrides(Scenario sc, const Overrides& o) {
  if (o.t_max) sc.t_max = *o.t_max;
  if (o.dt) sc.dt = *o.dt;
  return sc;
}

double resolved_dt(const Scenario& sc) {
  if (sc.dt) return *sc.dt;
  if (sc.pipeline == Pipeline::kExact)
    return std::min(default_dt(spectral_of(sc), probe_of(sc)), sc.t_max);
  return sc.t_max / kDefaultSteps;
}

SensitivitySeries compute_series(const Scenario& sc) {
  return compute(sc, false).series;
}

RunResult run_scenario(const Scenario& input) {
  Scenario sc = input;
  Computation comp = compute(sc, true);
  sc.dt = resolved_dt(sc);
  const output::RowFilter filter{sc.t_min, sc.output_stride};

  RunResult result;
  std::ostringstream summary;
  summary << "pipeline " << to_string(sc.pipeline) << ", " << comp.series.size()
          << " nodes\n";
  for (const auto& name : requested_series(sc)) {
    if (name == "sensitivity") {
      result.files.push_back({sc.name + "_sensitivity.csv",
                              output::sensitivity_csv(comp.series, filter)});
    } else if (name == "envelope") {
      const auto env = envelope_after(comp.series, sc.t_min);
      add(comp.report, "envelope_points", static_cast<double>(env.size()));
      if (env.size() == 0) {
        summary << "notice: no local minimum of dOmega in the output window\n";
      } else {
        const auto it =
            std::min_element(env.delta_omega.begin(), env.delta_omega.end());
        const auto k = static_cast<std::size_t>(it - env.delta_omega.begin());
        add(comp.report, "global_min_delta_omega", *it);
        add(comp.report, "t_at_global_min", env.times[k]);
        summary << "global minimum of envelope: dOmega = "
                << output::scalar(*it) << " at t = "
                << output::scalar(env.times[k]) << '\n';
      }
      result.files.push_back(
          {sc.name + "_envelope.csv", output::sensitivity_csv(env)});
    } else if (name == "trajectory") {
      result.files.push_back({sc.name + "_trajectory.csv",
                              output::trajectory_csv(*comp.trajectory, filter)});
    } else if (name == "masteq") {
      result.files.push_back(
          {sc.name + "_masteq.csv",
           output::masteq_csv(*comp.trajectory,
                              masteq_coefficients(*comp.trajectory), filter)});
    }
  }
  const std::string meta = sidecar(sc, result.files, comp.report);
  result.files.push_back({sc.name + "_meta.txt", meta});
  for (const auto& f : result.files) summary << "wrote " << f.name << '\n';
  result.summary = summary.str();
  return result;
}

SweepPoint evaluate_point(const Scenario& sc) {
  SweepPoint point;
  try {
    const SensitivitySeries series = compute_series(sc);
    if (sc.target_t) {
      const double dt = resolved_dt(sc);
      const auto node = std::clamp<long long>(
          std::llround(*sc.target_t / dt), 1,
          static_cast<long long>(series.size()));
      const auto i = static_cast<std::size_t>(node - 1);
      point.min_delta_omega = series.delta_omega[i];
      point.t_at_min = series.times[i];
      if (series.flags[i] != NodeFlag::kOk) point.flag = to_string(series.flags[i]);
      return point;
    }
    const auto env = envelope_after(series, sc.t_min);
    if (env.size() == 0) {
      point.min_delta_omega = kNaN;
      point.t_at_min = kNaN;
      point.flag = "no_minimum";
      return point;
    }
    const auto it = std::min_element(env.delta_omega.begin(), env.delta_omega.end());
    point.min_delta_omega = *it;
    point.t_at_min = env.times[static_cast<std::size_t>(it - env.delta_omega.begin())];
    return point;
  } catch (const RegimeError& e) {
    point.flag = "regime_error";
    point.message = e.what();
  } catch (const NumericalConsistencyError& e) {
    point.flag = "numerical_error";
    point.message = e.what();
  } catch (const DomainError& e) {
    point.flag = "domain_error";
    point.message = e.what();
  }
  point.min_delta_omega = kNaN;
  point.t_at_min = kNaN;
  return point;
}

RunResult run_sweep(const Scenario& base, const SweepOptions& options) {
  if (options.values.empty())
    throw DomainError("sweep: value list is empty");
  const auto& known = sweepable_parameters();
  if (std::find(known.begin(), known.end(), options.param) == known.end())
    throw DomainError("sweep: unknown parameter '" + options.param + "'");

  const std::size_t n = options.values.size();
  std::vector<SweepPoint> points(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        Scenario sc = base;
        sc.sweep.reset();
        set_parameter(sc, options.param, options.values[i]);
        points[i] = evaluate_point(sc);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<output::SweepRow> rows;
  std::ostringstream summary;
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = points[i];
    rows.push_back({options.param, options.values[i], p.min_delta_omega,
                    p.t_at_min, p.flag});
    if (!p.message.empty())
      summary << options.param << '=' << output::scalar(options.values[i])
              << ": " << p.flag << ": " << p.message << '\n';
    if (p.flag == "ok") fit_points.emplace_back(options.values[i], p.min_delta_omega);
  }

  Scenario resolved = base;
  resolved.sweep = SweepSpec{options.param, options.values};
  RunResult result;
  std::string csv = output::sweep_csv(rows);
  Report report;
  if (options.fit) {
    const FitResult fit = power_law_fit(fit_points);
    csv += "# power_law_fit prefactor=" + output::scalar(fit.prefactor) +
           " exponent=" + output::scalar(fit.exponent) +
           " residual=" + output::scalar(fit.residual) +
           " points=" + std::to_string(fit.points) + '\n';
    add(report, "fit_prefactor", fit.prefactor);
    add(report, "fit_exponent", fit.exponent);
    add(report, "fit_residual", fit.residual);
    summary << "power-law fit: prefactor " << output::scalar(fit.prefactor)
            << ", exponent " << output::scalar(fit.exponent) << '\n';
    result.files.push_back({base.name + "_sweep.csv", csv});
    result.files.push_back({base.name + "_fit.txt", output::fit_text(fit)});
  } else {
    result.files.push_back({base.name + "_sweep.csv", csv});
  }
  result.files.push_back(
      {base.name + "_sweep_meta.txt", sidecar(resolved, result.files, report)});
  for (const auto& f : result.files) summary << "wrote " << f.name << '\n';
  result.summary = summary.str();
  return result;
}

std::string spectrum_report(const SpectrumArgs& args) {
  ProbeConfig cfg = ProbeConfig::from_squeezing(args.Omega, 0.0, args.omega0);
  cfg.validate();
  std::ostringstream out;
  out << "eta=" << output::scalar(args.eta) << '\n'
      << "s=" << output::scalar(args.s) << '\n'
      << "omega_1=" << output::scalar(cfg.omega1()) << '\n'
      << "omega_2=" << output::scalar(cfg.omega2()) << '\n';
  if (!args.omega_c) {
    if (!(args.eta >= 0.0) || !(args.s > 0.0))
      throw DomainError("spectrum: need eta >= 0 and s > 0");
    out << "omega_c=unset\n"
        << "regime=undetermined\n"
        << "threshold_omega_c_1="
        << output::scalar(binding_threshold(args.eta, args.s, Frequency(cfg.omega1())))
        << '\n'
        << "threshold_omega_c_2="
        << output::scalar(binding_threshold(args.eta, args.s, Frequency(cfg.omega2())))
        << '\n';
    return out.str();
  }
  const SpectralDensity J(args.eta, *args.omega_c, args.s);
  out << "omega_c=" << output::scalar(*args.omega_c) << '\n';
  out << format_report(classify(J, cfg));
  return out.str();
}

KernelCheck kernel_check(double eta, double omega_c, double s,
                         const std::vector<double>& xs) {
  const SpectralDensity J(eta, omega_c, s);
  KernelCheck out;
  std::ostringstream table;
  table << "x,re_closed,im_closed,re_quadrature,im_quadrature,relative_error\n";
  for (const double x : xs) {
    const auto closed = J.kernel(x);
    const auto quad = kernel_by_quadrature(J, x);
    const double scale = std::abs(closed);
    const double rel = scale > 0.0 ? std::abs(closed - quad) / scale
                                   : std::abs(closed - quad);
    out.max_relative_error = std::max(out.max_relative_error, rel);
    table << output::number(x) << ',' << output::number(closed.real()) << ','
          << output::number(closed.imag()) << ',' << output::number(quad.real())
          << ',' << output::number(quad.imag()) << ',' << output::number(rel)
          << '\n';
  }
  out.table = table.str();
  return out;
}

void write_files(const RunResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  // Stage everything first so a failed write leaves no partial outputs.
  std::vector<std::pair<fs::path, fs::path>> staged;
  for (const auto& f : result.files) {
    const fs::path target = dir / f.name;
    fs::path tmp = target;
    tmp += ".part";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << f.content;
    out.close();
    if (!out) {
      for (const auto& [t, _] : staged) fs::remove(t, ec);
      fs::remove(tmp, ec);
      throw IoError("cannot write '" + target.string() + "'");
    }
    staged.emplace_back(tmp, target);
  }
  for (const auto& [tmp, target] : staged) {
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename to '" + target.string() + "'");
  }
}

}  // namespace qog::app
