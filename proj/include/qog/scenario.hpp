#pragma once

// Scenario files: flat sectioned key=value text.
//
//   [spectral]  eta, omega_c, s
//   [probe]     Omega, N | r, omega0
//   [grid]      t_max, dt, t_min, output_stride
//   [run]       pipeline, name, kappa, target_t, series
//   [sweep]     param, values
//
// '#' starts a comment. Sections [meta] and [report] are skipped, so a
// metadata sidecar can be fed back in as a scenario.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qog {

enum class Pipeline { kIdeal, kMarkovian, kExact, kAsymptotic };

const char* to_string(Pipeline p);

struct SweepSpec {
  std::string param;
  std::vector<double> values;
};

struct Scenario {
  std::string name = "scenario";
  Pipeline pipeline = Pipeline::kIdeal;

  std::optional<double> eta;
  std::optional<double> omega_c;
  double s = 1.0;

  double omega0 = 1.0;
  double Omega = 0.0;
  std::optional<double> N;
  std::optional<double> r;

  double t_max = 0.0;
  std::optional<double> dt;
  double t_min = 0.0;
  std::size_t output_stride = 1;

  /// Markovian pipeline only: decay rate used instead of pi J(w0).
  std::optional<double> kappa;
  /// Sweeps report dOmega at this time instead of the envelope minimum.
  std::optional<double> target_t;
  /// Subset of {sensitivity, envelope, trajectory, masteq}; empty = defaults.
  std::vector<std::string> series;

  std::optional<SweepSpec> sweep;

  bool has_spectral() const { return eta.has_value() && omega_c.has_value(); }
  double photon_number() const;
  double squeezing() const;

  /// Cross-field checks (pipeline requirements, ranges). Throws DomainError.
  void validate() const;
};

/// Throws ParseError with 1-based line and column.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Names accepted by set_parameter.
const std::vector<std::string>& sweepable_parameters();

/// Assigns a scalar field by name. Setting N clears r and vice versa.
/// Throws DomainError for unknown names.
void set_parameter(Scenario& sc, const std::string& name, double value);

/// Canonical text form; parse_scenario(to_text(sc)) reproduces sc.
std::string to_text(const Scenario& sc);

/// Comma-separated list of numbers. Throws DomainError on malformed input.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace qog
