#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "unemp/errors.hpp"

namespace unemp {

using RhsFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double initial_step = 0.1;  // months
  long max_steps = 1'000'000;
  double t_start = 0.0;
  double t_end = 150.0;

  void validate() const;
};

struct TrajectoryDiagnostics {
  long steps = 0;
  long rejected = 0;
  // Sample indices where any state component is negative. Reported, never
  // clamped.
  std::vector<std::size_t> negative_samples;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  TrajectoryDiagnostics diagnostics;
};

// Thrown by integrate(); carries the accepted samples so callers can keep a
// partial trajectory.
struct IntegrationBlowUp : BlowUpError {
  Trajectory partial;
  IntegrationBlowUp(const std::string& msg, double t, Trajectory traj)
      : BlowUpError(msg, t), partial(std::move(traj)) {}
};

// Dormand-Prince 5(4) embedded pair with PI step-size control. Accepted steps
// are recorded as trajectory samples; the last sample lands exactly on t_end.
Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& y0,
                     const IntegratorConfig& cfg);

// Classic fixed-step RK4, used as an independent reference in tests.
Trajectory rk4_fixed(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0,
                     double t1, double h);

// Fixed-step 5th-order Dormand-Prince formula (no error control); test use
// only.
Trajectory dp5_fixed(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0,
                     double t1, double h);

enum class ResampleMode {
  Time,   // linear interpolation at n equispaced times (default)
  Index,  // round(linspace(1,n_samples,n)) index selection
};

Trajectory resample(const Trajectory& traj, std::size_t n,
                    ResampleMode mode = ResampleMode::Time);

// CSV export: optional '#'-prefixed metadata line, then `t,<names...>`,
// one full-precision row per sample.
void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::vector<std::string>& state_names,
                          const std::string& metadata = {});

}  // namespace unemp
