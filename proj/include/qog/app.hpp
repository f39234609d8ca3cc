#pragma once

// Scenario execution behind the command-line tool. Everything is computed in
// memory first; files are written only after the whole run succeeded.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qog/scenario.hpp"
#include "qog/sensitivity.hpp"

namespace qog::app {

inline constexpr const char* kVersion = "1.0.0";

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  std::vector<OutputFile> files;
  /// Human-readable lines for stdout.
  std::string summary;
};

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_max;
};

Scenario apply_overrides(Scenario sc, const Overrides& o);

/// Grid step used when the scenario does not set dt.
double resolved_dt(const Scenario& sc);

/// Sensitivity series of the scenario's pipeline, without file rendering.
SensitivitySeries compute_series(const Scenario& sc);

RunResult run_scenario(const Scenario& sc);

struct SweepOptions {
  std::string param;
  std::vector<double> values;
  bool fit = false;
  unsigned workers = 1;
};

struct SweepPoint {
  double min_delta_omega = 0.0;
  double t_at_min = 0.0;
  /// ok, zero_derivative, no_minimum, regime_error, numerical_error,
  /// domain_error.
  std::string flag = "ok";
  std::string message;
};

/// Minimum of the local-minima envelope over t >= t_min, or the value at the
/// node nearest target_t when the scenario sets one. Errors become flags.
SweepPoint evaluate_point(const Scenario& sc);

/// One row per value in sweep order, computed on up to `workers` threads.
RunResult run_sweep(const Scenario& sc, const SweepOptions& options);

struct SpectrumArgs {
  double eta = 0.0;
  std::optional<double> omega_c;
  double s = 1.0;
  double Omega = 0.0;
  double omega0 = 1.0;
};

std::string spectrum_report(const SpectrumArgs& args);

struct KernelCheck {
  std::string table;
  double max_relative_error = 0.0;
};

/// Closed-form memory kernel against direct quadrature at lags `xs`.
KernelCheck kernel_check(double eta, double omega_c, double s,
                         const std::vector<double>& xs);

/// Creates `dir` if needed and writes every file. Throws IoError.
void write_files(const RunResult& result, const std::filesystem::path& dir);

}  // namespace qog::app
