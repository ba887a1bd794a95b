#include "unemp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "unemp/errors.hpp"

namespace unemp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// 5th-order solution weights (also the a7j row, FSAL).
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error weights: b - bhat.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

void record_negativity(Trajectory& traj) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if ((traj.states[i].array() < 0.0).any()) {
      traj.diagnostics.negative_samples.push_back(i);
    }
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0)) {
    throw InvalidInput("integrator tolerances must be positive");
  }
  if (!(t_end > t_start)) throw InvalidInput("t_end must exceed t_start");
  if (max_steps <= 0) throw InvalidInput("max_steps must be positive");
  if (!(initial_step > 0)) throw InvalidInput("initial_step must be positive");
}

Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& y0,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!y0.allFinite()) throw InvalidInput("integrate: non-finite y0");

  const Eigen::Index n = y0.size();
  Trajectory traj;
  traj.times.push_back(cfg.t_start);
  traj.states.push_back(y0);

  double t = cfg.t_start;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = rhs(t, y);
  if (!k1.allFinite()) {
    record_negativity(traj);
    throw IntegrationBlowUp("non-finite rhs at start", t, std::move(traj));
  }

  double h = std::min(cfg.initial_step, cfg.t_end - cfg.t_start);
  double err_prev = 1.0;
  Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), yerr(n);

  while (t < cfg.t_end) {
    if (traj.diagnostics.steps + traj.diagnostics.rejected >= cfg.max_steps) {
      throw StepLimitError("integrate: step limit exceeded", t);
    }
    bool last = false;
    if (t + h >= cfg.t_end) {
      h = cfg.t_end - t;
      last = true;
    }

    k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = rhs(t + h,
             y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(t + h, ynew);

    if (!ynew.allFinite() || !k7.allFinite()) {
      record_negativity(traj);
      throw IntegrationBlowUp("integrate: solution blew up", t,
                              std::move(traj));
    }

    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          cfg.abs_tol +
          cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = yerr[i] / scale;
      err += q * q;
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      t = last ? cfg.t_end : t + h;
      y = ynew;
      k1 = k7;  // FSAL
      traj.times.push_back(t);
      traj.states.push_back(y);
      ++traj.diagnostics.steps;
      // PI controller (beta = 0.04).
      const double safe = 0.9;
      double fac = safe * std::pow(std::max(err, 1e-16), -0.14) *
                   std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = std::max(err, 1e-16);
    } else {
      ++traj.diagnostics.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }

  record_negativity(traj);
  return traj;
}

Trajectory rk4_fixed(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0,
                     double t1, double h) {
  if (!(h > 0) || !(t1 > t0)) throw InvalidInput("rk4_fixed: bad interval");
  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y0);
  Eigen::VectorXd y = y0;
  const long nsteps = static_cast<long>(std::ceil((t1 - t0) / h - 1e-12));
  for (long i = 0; i < nsteps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double hs = std::min(h, t1 - t);
    const Eigen::VectorXd k1 = rhs(t, y);
    const Eigen::VectorXd k2 = rhs(t + hs / 2, y + hs / 2 * k1);
    const Eigen::VectorXd k3 = rhs(t + hs / 2, y + hs / 2 * k2);
    const Eigen::VectorXd k4 = rhs(t + hs, y + hs * k3);
    y += hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!y.allFinite()) throw BlowUpError("rk4_fixed: solution blew up", t);
    traj.times.push_back(i + 1 == nsteps ? t1 : t + hs);
    traj.states.push_back(y);
    ++traj.diagnostics.steps;
  }
  record_negativity(traj);
  return traj;
}

Trajectory dp5_fixed(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0,
                     double t1, double h) {
  if (!(h > 0) || !(t1 > t0)) throw InvalidInput("dp5_fixed: bad interval");
  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y0);
  Eigen::VectorXd y = y0;
  const long nsteps = static_cast<long>(std::ceil((t1 - t0) / h - 1e-12));
  for (long i = 0; i < nsteps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double hs = std::min(h, t1 - t);
    const Eigen::VectorXd k1 = rhs(t, y);
    const Eigen::VectorXd k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
    const Eigen::VectorXd k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 =
        rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        rhs(t + hs,
            y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y += hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (!y.allFinite()) throw BlowUpError("dp5_fixed: solution blew up", t);
    traj.times.push_back(i + 1 == nsteps ? t1 : t + hs);
    traj.states.push_back(y);
    ++traj.diagnostics.steps;
  }
  record_negativity(traj);
  return traj;
}

Trajectory resample(const Trajectory& traj, std::size_t n, ResampleMode mode) {
  if (n < 2) throw InvalidInput("resample: n must be >= 2");
  const std::size_t m = traj.times.size();
  Trajectory out;
  out.diagnostics = TrajectoryDiagnostics{};

  if (mode == ResampleMode::Index) {
    if (n > m) {
      throw InvalidInput("resample: n exceeds available samples in index mode");
    }
    // round(linspace(1, m, n)), 1-based, half away from zero.
    for (std::size_t i = 0; i < n; ++i) {
      const double pos = 1.0 + static_cast<double>(i) *
                                   (static_cast<double>(m) - 1.0) /
                                   (static_cast<double>(n) - 1.0);
      const std::size_t idx = static_cast<std::size_t>(std::lround(pos)) - 1;
      out.times.push_back(traj.times[idx]);
      out.states.push_back(traj.states[idx]);
    }
  } else {
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i + 1 == n
                           ? t1
                           : t0 + static_cast<double>(i) * (t1 - t0) /
                                      (static_cast<double>(n) - 1.0);
      while (j + 2 < m && traj.times[j + 1] <= t) ++j;
      const double ta = traj.times[j], tb = traj.times[j + 1];
      const double lam = tb > ta ? (t - ta) / (tb - ta) : 0.0;
      out.times.push_back(t);
      out.states.push_back((1.0 - lam) * traj.states[j] +
                           lam * traj.states[j + 1]);
    }
  }
  record_negativity(out);
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::vector<std::string>& state_names,
                          const std::string& metadata) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.precision(std::numeric_limits<double>::max_digits10);
  if (!metadata.empty()) os << "# " << metadata << "\n";
  os << "t";
  for (const auto& name : state_names) os << "," << name;
  os << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << traj.times[i];
    for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) {
      os << "," << traj.states[i][j];
    }
    os << "\n";
  }
}

}  // namespace unemp
