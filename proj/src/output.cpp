#include "qog/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qog::output {

namespace {

template <class Row>
void for_each_row(std::size_t n, const std::vector<double>& times,
                  const RowFilter& filter, Row&& row) {
  const std::size_t stride = filter.stride == 0 ? 1 : filter.stride;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] < filter.t_min) continue;
    if (kept++ % stride != 0) continue;
    row(i);
  }
}

std::vector<double> grid_times(const TimeGrid& grid) {
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid.time(i);
  return t;
}

}  // namespace

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string scalar(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj, const RowFilter& filter) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  const auto times = grid_times(traj.grid);
  for_each_row(traj.u1.size(), times, filter, [&](std::size_t i) {
    const auto& a = traj.u1[i];
    const auto& b = traj.u2[i];
    out << number(times[i]) << ',' << number(a.real()) << ','
        << number(a.imag()) << ',' << number(b.real()) << ','
        << number(b.imag()) << ',' << number(std::abs(a)) << ','
        << number(std::abs(b)) << '\n';
  });
  return out.str();
}

std::string sensitivity_csv(const SensitivitySeries& series,
                            const RowFilter& filter) {
  std::ostringstream out;
  out << kSensitivityHeader << '\n';
  for_each_row(series.size(), series.times, filter, [&](std::size_t i) {
    out << number(series.times[i]) << ',' << number(series.delta_omega[i])
        << ',' << to_string(series.flags[i]) << '\n';
  });
  return out.str();
}

std::string masteq_csv(const Trajectory& traj, const MasterEquationSeries& m,
                       const RowFilter& filter) {
  std::ostringstream out;
  out << kMasterEquationHeader << '\n';
  const auto times = grid_times(traj.grid);
  for_each_row(m.varpi1.size(), times, filter, [&](std::size_t i) {
    out << number(times[i]) << ',' << number(m.varpi1[i]) << ','
        << number(m.gamma1[i]) << ',' << number(m.varpi2[i]) << ','
        << number(m.gamma2[i]) << '\n';
  });
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.param << ',' << number(r.value) << ',' << number(r.min_delta_omega)
        << ',' << number(r.t_at_min) << ',' << r.flag << '\n';
  }
  return out.str();
}

std::string fit_text(const FitResult& fit) {
  std::ostringstream out;
  out << "prefactor=" << scalar(fit.prefactor) << '\n'
      << "exponent=" << scalar(fit.exponent) << '\n'
      << "residual=" << scalar(fit.residual) << '\n'
      << "points=" << fit.points << '\n';
  return out.str();
}

}  // namespace qog::output
