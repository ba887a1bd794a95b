#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "unemp/errors.hpp"
#include "unemp/integrator.hpp"
#include "unemp/model.hpp"

using namespace unemp;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

RhsFn decay() {
  return [](double, const Eigen::VectorXd& y) {
    return Eigen::VectorXd(-y);
  };
}

RhsFn portugal_rhs(double v0) {
  const auto p = portugal_2004_2016();
  const auto vac = VacancyFunction::constant(v0);
  return [p, vac](double t, const Eigen::VectorXd& y) {
    const auto d = rhs_new_model(p, {y[0], y[1]}, vac(t));
    Eigen::VectorXd out(2);
    out << d.U, d.E;
    return out;
  };
}

// max |y_num - y_exact| at the shared grid points of a fixed-step run.
double max_error(const Trajectory& traj,
                 const std::function<double(double)>& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    err = std::max(err, std::abs(traj.states[i][0] - exact(traj.times[i])));
  }
  return err;
}

}  // namespace

TEST_CASE("integrate: constant rhs gives a straight line") {
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  const auto traj = integrate(
      [](double, const Eigen::VectorXd&) { return vec1(3.0); }, vec1(1.0),
      cfg);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 10.0);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.states[i][0] ==
          doctest::Approx(1.0 + 3.0 * traj.times[i]).epsilon(1e-12));
  }
}

TEST_CASE("integrate: exponential decay hits 1/e within tolerance") {
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = 1e-10;
  const auto traj = integrate(decay(), vec1(1.0), cfg);
  CHECK(traj.states.back()[0] ==
        doctest::Approx(0.367879441171442).epsilon(1e-6));
}

TEST_CASE("integrate: two-compartment run stays positive and bounded") {
  IntegratorConfig cfg;
  Eigen::VectorXd y0(2);
  y0 << kInitialState.U, kInitialState.E;
  const auto traj = integrate(portugal_rhs(kVacancies2004Code), y0, cfg);
  CHECK(traj.diagnostics.negative_samples.empty());
  for (const auto& s : traj.states) {
    CHECK(s[0] > 0.0);
    CHECK(s[1] > 0.0);
    CHECK(s[0] + s[1] < 2e7);
  }
  // The state should settle near the fixed point for this vacancy level.
  const auto eq = equilibrium(portugal_2004_2016(), kVacancies2004Code);
  CHECK(traj.states.back()[0] == doctest::Approx(eq.U).epsilon(1e-3));
  CHECK(traj.states.back()[1] == doctest::Approx(eq.E).epsilon(1e-3));
}

TEST_CASE("integrate: halving the tolerance does not grow the error") {
  Eigen::VectorXd y0(2);
  y0 << kInitialState.U, kInitialState.E;
  const auto rhs = portugal_rhs(kVacancies2004Code);
  // High-accuracy reference from the independent fixed-step formula.
  const auto ref = dp5_fixed(rhs, y0, 0.0, 150.0, 0.01);
  const Eigen::VectorXd y_ref = ref.states.back();

  double prev_err = std::numeric_limits<double>::infinity();
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol * 1e-2;
    const auto traj = integrate(rhs, y0, cfg);
    const double err =
        (traj.states.back() - y_ref).norm() / y_ref.norm();
    CHECK(err <= 10.0 * tol);
    CHECK(err <= prev_err * 1.5 + 1e-14);  // monotone up to noise
    prev_err = err;
  }
}

TEST_CASE("dp5_fixed: observed convergence order is at least 4.5") {
  // y' = cos(t) y^2, y(0) = 1/2, exact y = 1/(2 - sin t).
  const RhsFn rhs = [](double t, const Eigen::VectorXd& y) {
    return vec1(std::cos(t) * y[0] * y[0]);
  };
  const auto exact = [](double t) { return 1.0 / (2.0 - std::sin(t)); };
  const double e1 =
      max_error(dp5_fixed(rhs, vec1(0.5), 0.0, 10.0, 0.1), exact);
  const double e2 =
      max_error(dp5_fixed(rhs, vec1(0.5), 0.0, 10.0, 0.05), exact);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 4.5);
}

TEST_CASE("rk4_fixed agrees with the adaptive run at tight tolerance") {
  Eigen::VectorXd y0(2);
  y0 << kInitialState.U, kInitialState.E;
  const auto rhs = portugal_rhs(kVacancies2004Code);
  const auto fixed = rk4_fixed(rhs, y0, 0.0, 150.0, 1e-3);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const auto adaptive = integrate(rhs, y0, cfg);
  const double rel =
      (fixed.states.back() - adaptive.states.back()).norm() /
      adaptive.states.back().norm();
  CHECK(rel <= 1e-4);
}

TEST_CASE("integrate is deterministic bit for bit") {
  Eigen::VectorXd y0(2);
  y0 << kInitialState.U, kInitialState.E;
  const auto rhs = portugal_rhs(kVacancies2004Text);
  IntegratorConfig cfg;
  const auto a = integrate(rhs, y0, cfg);
  const auto b = integrate(rhs, y0, cfg);
  REQUIRE(a.times.size() == b.times.size());
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.times[i] == b.times[i]);
    CHECK(a.states[i][0] == b.states[i][0]);
    CHECK(a.states[i][1] == b.states[i][1]);
  }
}

TEST_CASE("resample: index mode reproduces the rounded linspace rule") {
  Trajectory traj;
  for (int i = 0; i < 1737; ++i) {
    traj.times.push_back(double(i));
    traj.states.push_back(vec1(double(i)));
  }
  const auto out = resample(traj, 150, ResampleMode::Index);
  REQUIRE(out.times.size() == 150);
  for (std::size_t i = 0; i < 150; ++i) {
    // 1-based: round(1 + i*(1736)/149), converted back to a 0-based index.
    const double pos = 1.0 + double(i) * 1736.0 / 149.0;
    const auto idx = std::size_t(std::lround(pos)) - 1;
    CHECK(out.states[i][0] == double(idx));
  }
  CHECK(out.states.front()[0] == 0.0);
  CHECK(out.states.back()[0] == 1736.0);
}

TEST_CASE("resample: identity when n equals the sample count") {
  Trajectory traj;
  for (int i = 0; i < 7; ++i) {
    traj.times.push_back(0.5 * i);
    traj.states.push_back(vec1(std::sin(i)));
  }
  for (auto mode : {ResampleMode::Index, ResampleMode::Time}) {
    const auto out = resample(traj, 7, mode);
    REQUIRE(out.times.size() == 7);
    for (int i = 0; i < 7; ++i) {
      CHECK(out.times[i] == doctest::Approx(traj.times[i]).epsilon(1e-15));
      CHECK(out.states[i][0] ==
            doctest::Approx(traj.states[i][0]).epsilon(1e-15));
    }
  }
}

TEST_CASE("resample: time mode is exact on affine data") {
  Trajectory traj;
  // Deliberately non-uniform sampling of y = 2t + 1.
  for (double t : {0.0, 0.3, 1.1, 2.5, 2.6, 4.0}) {
    traj.times.push_back(t);
    traj.states.push_back(vec1(2.0 * t + 1.0));
  }
  const auto out = resample(traj, 9, ResampleMode::Time);
  REQUIRE(out.times.size() == 9);
  CHECK(out.times.front() == doctest::Approx(0.0));
  CHECK(out.times.back() == doctest::Approx(4.0));
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    CHECK(out.states[i][0] ==
          doctest::Approx(2.0 * out.times[i] + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("integrate: step limit raises StepLimitError") {
  IntegratorConfig cfg;
  cfg.max_steps = 10;
  cfg.t_end = 150.0;
  Eigen::VectorXd y0(2);
  y0 << kInitialState.U, kInitialState.E;
  CHECK_THROWS_AS(integrate(portugal_rhs(kVacancies2004Code), y0, cfg),
                  StepLimitError);
}

TEST_CASE("integrate: finite-time blow-up carries a partial trajectory") {
  // y' = y^2, y(0) = 1 blows up at t = 1.
  const RhsFn rhs = [](double, const Eigen::VectorXd& y) {
    return vec1(y[0] * y[0]);
  };
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  try {
    integrate(rhs, vec1(1.0), cfg);
    FAIL("expected IntegrationBlowUp");
  } catch (const IntegrationBlowUp& e) {
    CHECK(e.last_good_time < 1.05);
    CHECK(e.partial.times.size() > 1);
    CHECK(e.partial.times.back() == e.last_good_time);
    // Accepted samples away from the singularity still track 1/(1-t).
    bool checked = false;
    for (std::size_t i = 0; i < e.partial.times.size(); ++i) {
      const double t = e.partial.times[i];
      if (t > 0.5 && t < 0.9) {
        CHECK(e.partial.states[i][0] ==
              doctest::Approx(1.0 / (1.0 - t)).epsilon(1e-3));
        checked = true;
      }
    }
    CHECK(checked);
  }
}

TEST_CASE("integrate reports negative samples without clamping") {
  // y' = -1 crosses zero at t = 1.
  const RhsFn rhs = [](double, const Eigen::VectorXd&) { return vec1(-1.0); };
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  const auto traj = integrate(rhs, vec1(1.0), cfg);
  CHECK_FALSE(traj.diagnostics.negative_samples.empty());
  CHECK(traj.states.back()[0] == doctest::Approx(-1.0).epsilon(1e-9));
  for (auto idx : traj.diagnostics.negative_samples) {
    CHECK(traj.states[idx].minCoeff() < 0.0);
  }
}

TEST_CASE("invalid configuration is rejected") {
  IntegratorConfig cfg;
  cfg.t_end = cfg.t_start;
  Eigen::VectorXd y0 = vec1(1.0);
  CHECK_THROWS_AS(integrate(decay(), y0, cfg), InvalidInput);
  IntegratorConfig cfg2;
  cfg2.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate(decay(), y0, cfg2), InvalidInput);
}
