#pragma once

#include <cstddef>

namespace qog {

/// Gyroscope parameters. Mode frequencies are w0 + Omega and w0 - Omega (the
/// basic standing-wave mode of the ring). The squeeze parameter r is stored;
/// the photon number N = 2 sinh^2 r is derived from it.
struct ProbeConfig {
  double omega0 = 1.0;
  double Omega = 0.0;
  double r = 0.0;

  static ProbeConfig from_photon_number(double Omega, double N,
                                        double omega0 = 1.0);
  static ProbeConfig from_squeezing(double Omega, double r,
                                    double omega0 = 1.0);

  double photon_number() const;
  double omega1() const;
  double omega2() const;

  /// Same probe with a different angular velocity.
  ProbeConfig with_Omega(double Omega) const;

  /// Throws DomainError if either mode frequency is non-positive or r < 0.
  void validate() const;
};

double squeezing_from_photon_number(double N);
double photon_number_from_squeezing(double r);

/// Uniform grid 0, dt, ..., steps * dt with steps * dt <= t_max.
struct TimeGrid {
  double t_max = 0.0;
  double dt = 0.0;

  TimeGrid() = default;
  /// Throws DomainError unless dt > 0 and t_max >= dt.
  TimeGrid(double t_max, double dt);

  std::size_t steps() const;
  std::size_t size() const { return steps() + 1; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

}  // namespace qog
