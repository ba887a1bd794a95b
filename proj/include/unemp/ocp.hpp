#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "unemp/model.hpp"

namespace unemp {

// Constrained optimal-control instance over [t_start, t_end] months.
struct OcpProblem {
  ModelParams params = portugal_2004_2016();
  VacancyFunction vacancy = vacancy_fit_2004_2016();
  double t_start = 0.0;
  double t_end = 150.0;
  int grid_intervals = 150;

  double weight_state = 20.0;   // A, per unemployed-person-month
  double weight_u1 = 1.0;       // B, per internship
  double weight_u2 = 40000.0;   // C, per unit of indirect intensity

  double u1_min = -40000.0;
  double u1_max = 40000.0;
  double u2_min = 0.0;
  double u2_max = 1.0;

  LaborState initial = kInitialState;
  double terminal_min = 5.0e6;  // bounds on U(T)+E(T)
  double terminal_max = 8.0e6;
  double rate_cap = 0.12;       // U/(U+E) <= rate_cap at every node

  // Reference level for the A*(U - U_ref) integrand term; NaN means "use
  // initial.U". A pure reporting offset, irrelevant to the argmin.
  double u_reference = std::nan("");

  // Feed V through an explicit clock state with unit rate instead of
  // evaluating V(t) at node times.
  bool clock_state = false;

  void validate() const;
  double reference_level() const {
    return std::isnan(u_reference) ? initial.U : u_reference;
  }
};

OcpProblem paper_text_problem();
// Dynamics as in the published solver listing: employed inflow 50000 and
// employed attrition 0.111/month instead of Table values.
OcpProblem appendix_acado_problem();

struct SolverOptions {
  double kkt_tol = 1e-4;    // scaled projected-gradient infinity norm
  double feas_tol = 1e-6;   // scaled defect / path / terminal tolerance
  int max_outer = 60;
  long max_inner_total = 2'000'000;
  bool verbose = false;
};

SolverOptions acado_compat_options();  // loose KKT tolerance 1e-2

struct OcpSolution {
  std::vector<double> times;        // N+1 node instants
  std::vector<double> U, E;         // N+1 node states
  std::vector<double> u1, u2;       // N per-interval controls
  double objective = 0.0;           // includes the -A*U_ref*T offset
  double max_defect = 0.0;          // scaled dynamics residual, inf norm
  double max_path_violation = 0.0;  // rate units
  double max_terminal_violation = 0.0;  // scaled
  double kkt_residual = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  long inner_iterations = 0;
  std::string message;
  std::vector<std::string> iteration_log;
};

// Trapezoidal direct collocation of an OcpProblem. States live at the N+1
// nodes, controls are piecewise constant per interval. All public functions
// work on the scaled decision vector z.
class Transcription {
 public:
  explicit Transcription(OcpProblem prob);

  const OcpProblem& problem() const { return prob_; }
  int num_vars() const { return nz_; }
  int num_eq() const { return ns_ * n_; }
  int num_ineq() const { return (n_ + 1) + 2; }
  int num_states() const { return ns_; }
  int intervals() const { return n_; }
  double node_time(int k) const { return t0_ + h_ * k; }

  Eigen::VectorXd lower_bounds() const { return lb_; }
  Eigen::VectorXd upper_bounds() const { return ub_; }

  // Zero-control trajectory for states, controls at zero; u1 pushed to its
  // upper bound on path-violating intervals.
  Eigen::VectorXd initial_guess() const;

  double objective(const Eigen::VectorXd& z) const;  // scaled, with offset
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const;
  Eigen::VectorXd equality(const Eigen::VectorXd& z) const;    // = 0
  Eigen::VectorXd inequality(const Eigen::VectorXd& z) const;  // <= 0
  Eigen::MatrixXd equality_jacobian(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd inequality_jacobian(const Eigen::VectorXd& z) const;

  // Exact discrete rollout of given per-interval controls (implicit
  // trapezoid, Newton to machine tolerance). Returns the full decision
  // vector with states replaced by the rollout.
  Eigen::VectorXd rollout(const std::vector<double>& u1,
                          const std::vector<double>& u2) const;

  OcpSolution extract(const Eigen::VectorXd& z) const;

  double objective_scale() const { return f_scale_; }
  double state_scale() const { return sx_; }

  // Shrink path/terminal feasible set used inside the solver so that the
  // post-solve exact rollout stays feasible at reporting tolerances.
  void set_constraint_margin(double rate_margin, double terminal_margin);

 private:
  friend class AugLagSolver;
  int ix(int k, int j) const { return k * ns_ + j; }
  int iu1(int k) const { return ns_ * (n_ + 1) + k; }
  int iu2(int k) const { return ns_ * (n_ + 1) + n_ + k; }

  // Unscaled dynamics and its partials at node time index / clock value.
  Eigen::VectorXd dynamics(double t, const Eigen::VectorXd& x, double u1,
                           double u2) const;
  Eigen::MatrixXd dynamics_jac_state(double t, const Eigen::VectorXd& x,
                                     double u1, double u2) const;
  Eigen::VectorXd dynamics_jac_u1(double t, const Eigen::VectorXd& x) const;
  Eigen::VectorXd dynamics_jac_u2(double t, const Eigen::VectorXd& x) const;
  double vacancies_at(double t, const Eigen::VectorXd& x) const;

  OcpProblem prob_;
  int n_;       // intervals
  int ns_;      // state dimension (2, or 3 with clock)
  int nz_;
  double t0_, h_;
  double sx_ = 1e6;       // person-count scale
  double sc_ = 100.0;     // clock scale
  double su1_, su2_;
  double f_scale_ = 1e9;
  double rate_margin_ = 0.0, terminal_margin_ = 0.0;
  Eigen::VectorXd lb_, ub_;
  std::vector<double> v_nodes_;  // V(t_k) when not in clock mode
};

OcpSolution solve(const OcpProblem& prob, const SolverOptions& opts = {});

struct PolicyEvaluation {
  std::vector<double> times;
  std::vector<double> U, E;
  double objective = 0.0;
  double max_path_violation = 0.0;
  double max_terminal_violation = 0.0;  // scaled
};

// Discrete rollout of given controls with the problem's collocation scheme;
// reports the trapezoidal objective and constraint violations.
PolicyEvaluation evaluate_policy(const OcpProblem& prob,
                                 const std::vector<double>& u1,
                                 const std::vector<double>& u2);

std::vector<double> control_cost_series(const OcpSolution& sol, double B,
                                        double C);

}  // namespace unemp
