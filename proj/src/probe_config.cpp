#include "qog/probe_config.hpp"

#include <cmath>
#include <limits>

#include "qog/errors.hpp"
#include "qog/probe.hpp"

namespace qog {

double squeezing_from_photon_number(double N) {
  if (!(N >= 0.0) || !std::isfinite(N))
    throw DomainError("photon number must be finite and >= 0");
  return std::asinh(std::sqrt(0.5 * N));
}

double photon_number_from_squeezing(double r) {
  const double sh = std::sinh(r);
  return 2.0 * sh * sh;
}

ProbeConfig ProbeConfig::from_photon_number(double Omega, double N,
                                            double omega0) {
  return from_squeezing(Omega, squeezing_from_photon_number(N), omega0);
}

ProbeConfig ProbeConfig::from_squeezing(double Omega, double r, double omega0) {
  ProbeConfig cfg;
  cfg.omega0 = omega0;
  cfg.Omega = Omega;
  cfg.r = r;
  cfg.validate();
  return cfg;
}

double ProbeConfig::photon_number() const {
  return photon_number_from_squeezing(r);
}

double ProbeConfig::omega1() const {
  return omega0 + 0.5 * sagnac_map(1, Omega);
}

double ProbeConfig::omega2() const {
  return omega0 - 0.5 * sagnac_map(1, Omega);
}

ProbeConfig ProbeConfig::with_Omega(double new_Omega) const {
  ProbeConfig cfg = *this;
  cfg.Omega = new_Omega;
  return cfg;
}

void ProbeConfig::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0))
    throw DomainError("probe: omega0 must be finite and > 0");
  if (!std::isfinite(Omega))
    throw DomainError("probe: Omega must be finite");
  if (!(r >= 0.0) || !std::isfinite(r))
    throw DomainError("probe: squeeze parameter r must be finite and >= 0");
  if (!(omega2() > 0.0) || !(omega1() > 0.0))
    throw DomainError("probe: mode frequencies omega0 +- Omega must be > 0");
}

TimeGrid::TimeGrid(double t_max_in, double dt_in) : t_max(t_max_in), dt(dt_in) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw DomainError("time grid: dt must be finite and > 0");
  if (!(t_max >= dt) || !std::isfinite(t_max))
    throw DomainError("time grid: t_max must be finite and >= dt");
  if (t_max / dt > 1e9)
    throw DomainError("time grid: more than 1e9 steps requested");
}

std::size_t TimeGrid::steps() const {
  if (!(dt > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12)));
}

}  // namespace qog
