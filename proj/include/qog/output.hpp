#pragma once

// Deterministic text renderings: CSV tables and key=value blocks.

#include <string>
#include <vector>

#include "qog/sensitivity.hpp"
#include "qog/volterra.hpp"

namespace qog::output {

inline constexpr const char* kTrajectoryHeader =
    "t,re_u1,im_u1,re_u2,im_u2,abs_u1,abs_u2";
inline constexpr const char* kSensitivityHeader = "t,delta_omega,flag";
inline constexpr const char* kSweepHeader =
    "param,value,min_delta_omega,t_at_min,flag";
inline constexpr const char* kMasterEquationHeader =
    "t,varpi1,gamma1,varpi2,gamma2";

/// Lower-case scientific with 17 significant digits; "inf", "-inf", "nan".
std::string number(double v);

/// Shortest round-trip-safe general form (%.17g) for key=value text.
std::string scalar(double v);

/// Row selection shared by all time-series tables.
struct RowFilter {
  double t_min = 0.0;
  std::size_t stride = 1;
};

std::string trajectory_csv(const Trajectory& traj, const RowFilter& filter = {});
std::string sensitivity_csv(const SensitivitySeries& series,
                            const RowFilter& filter = {});
std::string masteq_csv(const Trajectory& traj, const MasterEquationSeries& m,
                       const RowFilter& filter = {});

struct SweepRow {
  std::string param;
  double value = 0.0;
  double min_delta_omega = 0.0;
  double t_at_min = 0.0;
  std::string flag;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string fit_text(const FitResult& fit);

}  // namespace qog::output
