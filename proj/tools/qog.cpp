// qog: command-line front end for the gyroscope sensitivity library.
//
// Exit codes: 0 success, 2 usage / parse / domain, 3 physics regime,
// 4 numerical consistency.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qog/app.hpp"
#include "qog/errors.hpp"
#include "qog/scenario.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRegime = 3;
constexpr int kExitNumerical = 4;

struct Common {
  std::string out = ".";
  unsigned workers = 1;
  std::optional<double> dt;
  std::optional<double> t_max;
};

void add_common(CLI::App* cmd, Common& c, bool with_workers) {
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--dt", c.dt, "Override the scenario time step");
  cmd->add_option("--tmax", c.t_max, "Override the scenario horizon");
  if (with_workers)
    cmd->add_option("--workers", c.workers, "Concurrent sweep points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

int report(const std::string& kind, const std::exception& e, int code) {
  std::cerr << "qog: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Quantum optical gyroscope: sensitivity under non-Markovian "
               "photon loss"};
  cli.set_version_flag("--version", std::string(qog::app::kVersion));
  cli.require_subcommand(1);

  Common common;

  std::string run_path;
  auto* run = cli.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", run_path, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(run, common, false);

  qog::app::SpectrumArgs spec;
  double spectrum_omega_c = 0.0;
  auto* spectrum = cli.add_subcommand(
      "spectrum", "Bound-state regime, thresholds, E_b and Z per mode");
  spectrum->add_option("--eta", spec.eta, "Coupling strength")->required();
  auto* omega_c_opt = spectrum->add_option("--omega-c", spectrum_omega_c,
                                           "Cutoff frequency");
  spectrum->add_option("--s", spec.s, "Ohmicity")->capture_default_str();
  spectrum->add_option("--Omega", spec.Omega, "Angular velocity")
      ->capture_default_str();
  spectrum->add_option("--omega0", spec.omega0, "Bare mode frequency")
      ->capture_default_str();

  std::string sweep_path, sweep_param, sweep_values;
  bool sweep_fit = false;
  auto* sweep = cli.add_subcommand("sweep", "Sweep one scenario parameter");
  sweep->add_option("scenario", sweep_path, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_param, "Parameter to sweep");
  sweep->add_option("--values", sweep_values, "Comma-separated values");
  sweep->add_flag("--fit", sweep_fit, "Append a power-law fit of the minima");
  add_common(sweep, common, true);

  double kc_eta = 0.05, kc_omega_c = 25.0, kc_s = 1.0, kc_tol = 1e-8;
  std::string kc_lags;
  auto* kernel = cli.add_subcommand(
      "kernel-check", "Closed-form memory kernel against direct quadrature");
  kernel->add_option("--eta", kc_eta)->capture_default_str();
  kernel->add_option("--omega-c", kc_omega_c)->capture_default_str();
  kernel->add_option("--s", kc_s)->capture_default_str();
  kernel->add_option("--x", kc_lags,
                     "Comma-separated lags (default: 0 to 20 / omega_c)");
  kernel->add_option("--tol", kc_tol, "Maximum relative deviation")
      ->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kExitUsage;
  }

  const qog::app::Overrides overrides{common.dt, common.t_max};
  try {
    if (*run) {
      auto sc = qog::app::apply_overrides(qog::load_scenario(run_path), overrides);
      const auto result = qog::app::run_scenario(sc);
      qog::app::write_files(result, common.out);
      std::cout << result.summary;
      return 0;
    }
    if (*spectrum) {
      if (*omega_c_opt) spec.omega_c = spectrum_omega_c;
      std::cout << qog::app::spectrum_report(spec);
      return 0;
    }
    if (*sweep) {
      auto sc = qog::app::apply_overrides(qog::load_scenario(sweep_path), overrides);
      qog::app::SweepOptions opt;
      opt.fit = sweep_fit;
      opt.workers = common.workers;
      opt.param = sweep_param.empty() && sc.sweep ? sc.sweep->param : sweep_param;
      opt.values = sweep_values.empty() && sc.sweep
                       ? sc.sweep->values
                       : qog::parse_number_list(sweep_values);
      if (opt.param.empty())
        throw qog::DomainError("sweep: no --param and no [sweep] section");
      const auto result = qog::app::run_sweep(sc, opt);
      qog::app::write_files(result, common.out);
      std::cout << result.summary;
      return 0;
    }
    if (*kernel) {
      std::vector<double> lags;
      if (kc_lags.empty()) {
        for (const double k : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
          lags.push_back(k / kc_omega_c);
      } else {
        lags = qog::parse_number_list(kc_lags);
      }
      const auto check = qog::app::kernel_check(kc_eta, kc_omega_c, kc_s, lags);
      std::cout << check.table << "max_relative_error="
                << check.max_relative_error << '\n';
      if (check.max_relative_error > kc_tol) {
        std::cerr << "qog: kernel-check: deviation exceeds " << kc_tol << '\n';
        return kExitNumerical;
      }
      return 0;
    }
  } catch (const qog::ParseError& e) {
    std::cerr << "qog: parse error at line " << e.line() << ", column "
              << e.column() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const qog::DomainError& e) {
    return report("invalid input", e, kExitUsage);
  } catch (const qog::IoError& e) {
    return report("output", e, kExitUsage);
  } catch (const qog::RegimeError& e) {
    return report("regime", e, kExitRegime);
  } catch (const qog::NumericalConsistencyError& e) {
    return report("numerical", e, kExitNumerical);
  } catch (const std::exception& e) {
    return report("error", e, kExitNumerical);
  }
  return kExitUsage;
}
