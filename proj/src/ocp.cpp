#include "unemp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "unemp/errors.hpp"

namespace unemp {

namespace {

double fourier_derivative(const VacancyFunction& f, double t) {
  const double x = f.w * t;
  return f.w * (-f.a1 * std::sin(x) + f.b1 * std::cos(x) -
                2 * f.a2 * std::sin(2 * x) + 2 * f.b2 * std::cos(2 * x) -
                3 * f.a3 * std::sin(3 * x) + 3 * f.b3 * std::cos(3 * x));
}

}  // namespace

void OcpProblem::validate() const {
  params.validate();
  if (!(t_end > t_start)) throw InvalidInput("ocp: t_end must exceed t_start");
  if (grid_intervals < 2) throw InvalidInput("ocp: grid_intervals >= 2");
  if (!(u1_min <= u1_max) || !(u2_min <= u2_max)) {
    throw InvalidInput("ocp: control bounds out of order");
  }
  if (!(terminal_min <= terminal_max)) {
    throw InvalidInput("ocp: terminal box out of order");
  }
  if (!std::isfinite(weight_state) || !std::isfinite(weight_u1) ||
      !std::isfinite(weight_u2)) {
    throw InvalidInput("ocp: non-finite weights");
  }
  if (!(rate_cap > 0)) throw InvalidInput("ocp: rate_cap must be positive");
}

OcpProblem paper_text_problem() { return OcpProblem{}; }

OcpProblem appendix_acado_problem() {
  OcpProblem p;
  p.params.omega = 50000.0;
  p.params.delta = 0.06;
  return p;
}

SolverOptions acado_compat_options() {
  SolverOptions o;
  o.kkt_tol = 1e-2;
  return o;
}

Transcription::Transcription(OcpProblem prob) : prob_(std::move(prob)) {
  prob_.validate();
  n_ = prob_.grid_intervals;
  ns_ = prob_.clock_state ? 3 : 2;
  nz_ = ns_ * (n_ + 1) + 2 * n_;
  t0_ = prob_.t_start;
  h_ = (prob_.t_end - prob_.t_start) / n_;
  su1_ = std::max({std::abs(prob_.u1_min), std::abs(prob_.u1_max), 1.0});
  su2_ = std::max({std::abs(prob_.u2_min), std::abs(prob_.u2_max), 1.0});

  if (!prob_.clock_state) {
    v_nodes_.resize(n_ + 1);
    for (int k = 0; k <= n_; ++k) v_nodes_[k] = prob_.vacancy(node_time(k));
  }

  const double inf = std::numeric_limits<double>::infinity();
  lb_ = Eigen::VectorXd::Constant(nz_, -inf);
  ub_ = Eigen::VectorXd::Constant(nz_, inf);
  // Initial state fixed through the bounds.
  lb_[ix(0, 0)] = ub_[ix(0, 0)] = prob_.initial.U / sx_;
  lb_[ix(0, 1)] = ub_[ix(0, 1)] = prob_.initial.E / sx_;
  if (ns_ == 3) lb_[ix(0, 2)] = ub_[ix(0, 2)] = 0.0;
  for (int k = 0; k < n_; ++k) {
    lb_[iu1(k)] = prob_.u1_min / su1_;
    ub_[iu1(k)] = prob_.u1_max / su1_;
    lb_[iu2(k)] = prob_.u2_min / su2_;
    ub_[iu2(k)] = prob_.u2_max / su2_;
  }
}

void Transcription::set_constraint_margin(double rate_margin,
                                          double terminal_margin) {
  rate_margin_ = rate_margin;
  terminal_margin_ = terminal_margin;
}

double Transcription::vacancies_at(double t, const Eigen::VectorXd& x) const {
  if (ns_ == 3) return prob_.vacancy(x[2] * sc_);
  // t is a node time here; the table was precomputed.
  const int k = static_cast<int>(std::lround((t - t0_) / h_));
  return v_nodes_[static_cast<std::size_t>(k)];
}

Eigen::VectorXd Transcription::dynamics(double t, const Eigen::VectorXd& x,
                                        double u1, double u2) const {
  const auto& p = prob_.params;
  const double U = x[0] * sx_, E = x[1] * sx_;
  const double v = vacancies_at(t, x);
  const double match = p.kappa * U * v * (1.0 + u2);
  Eigen::VectorXd f(ns_);
  f[0] = (p.Lambda - match - p.alpha1 * U + p.gamma * E - u1) / sx_;
  f[1] = (p.omega + match - (p.alpha2 + p.gamma + p.delta) * E + p.rho * U +
          u1) /
         sx_;
  if (ns_ == 3) f[2] = 1.0 / sc_;
  return f;
}

Eigen::MatrixXd Transcription::dynamics_jac_state(double t,
                                                  const Eigen::VectorXd& x,
                                                  double u1, double u2) const {
  (void)u1;
  const auto& p = prob_.params;
  const double U = x[0] * sx_;
  const double v = vacancies_at(t, x);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(ns_, ns_);
  j(0, 0) = -p.kappa * v * (1.0 + u2) - p.alpha1;
  j(0, 1) = p.gamma;
  j(1, 0) = p.kappa * v * (1.0 + u2) + p.rho;
  j(1, 1) = -(p.alpha2 + p.gamma + p.delta);
  if (ns_ == 3) {
    const double dv = fourier_derivative(prob_.vacancy, x[2] * sc_) * sc_;
    j(0, 2) = -p.kappa * U * (1.0 + u2) * dv / sx_;
    j(1, 2) = p.kappa * U * (1.0 + u2) * dv / sx_;
  }
  return j;
}

Eigen::VectorXd Transcription::dynamics_jac_u1(double t,
                                               const Eigen::VectorXd& x) const {
  (void)t;
  (void)x;
  Eigen::VectorXd j = Eigen::VectorXd::Zero(ns_);
  j[0] = -1.0 / sx_;
  j[1] = 1.0 / sx_;
  return j;
}

Eigen::VectorXd Transcription::dynamics_jac_u2(double t,
                                               const Eigen::VectorXd& x) const {
  const auto& p = prob_.params;
  const double U = x[0] * sx_;
  const double v = vacancies_at(t, x);
  Eigen::VectorXd j = Eigen::VectorXd::Zero(ns_);
  j[0] = -p.kappa * U * v / sx_;
  j[1] = p.kappa * U * v / sx_;
  return j;
}

double Transcription::objective(const Eigen::VectorXd& z) const {
  const double a = prob_.weight_state;
  double integral = 0.0;
  for (int k = 0; k <= n_; ++k) {
    const double weight = (k == 0 || k == n_) ? 0.5 : 1.0;
    integral += weight * a * z[ix(k, 0)] * sx_;
  }
  integral *= h_;
  for (int k = 0; k < n_; ++k) {
    integral += h_ * (prob_.weight_u1 * z[iu1(k)] * su1_ +
                      prob_.weight_u2 * z[iu2(k)] * su2_);
  }
  const double offset =
      a * prob_.reference_level() * (prob_.t_end - prob_.t_start);
  return (integral - offset) / f_scale_;
}

Eigen::VectorXd Transcription::objective_gradient(
    const Eigen::VectorXd& z) const {
  (void)z;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nz_);
  for (int k = 0; k <= n_; ++k) {
    const double weight = (k == 0 || k == n_) ? 0.5 : 1.0;
    g[ix(k, 0)] = h_ * weight * prob_.weight_state * sx_ / f_scale_;
  }
  for (int k = 0; k < n_; ++k) {
    g[iu1(k)] = h_ * prob_.weight_u1 * su1_ / f_scale_;
    g[iu2(k)] = h_ * prob_.weight_u2 * su2_ / f_scale_;
  }
  return g;
}

Eigen::VectorXd Transcription::equality(const Eigen::VectorXd& z) const {
  Eigen::VectorXd c(num_eq());
  for (int k = 0; k < n_; ++k) {
    const Eigen::VectorXd xk = z.segment(ix(k, 0), ns_);
    const Eigen::VectorXd xk1 = z.segment(ix(k + 1, 0), ns_);
    const double u1 = z[iu1(k)] * su1_, u2 = z[iu2(k)] * su2_;
    const Eigen::VectorXd fk = dynamics(node_time(k), xk, u1, u2);
    const Eigen::VectorXd fk1 = dynamics(node_time(k + 1), xk1, u1, u2);
    c.segment(ns_ * k, ns_) = xk1 - xk - (h_ / 2.0) * (fk + fk1);
  }
  return c;
}

Eigen::MatrixXd Transcription::equality_jacobian(
    const Eigen::VectorXd& z) const {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(num_eq(), nz_);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ns_, ns_);
  for (int k = 0; k < n_; ++k) {
    const Eigen::VectorXd xk = z.segment(ix(k, 0), ns_);
    const Eigen::VectorXd xk1 = z.segment(ix(k + 1, 0), ns_);
    const double u1 = z[iu1(k)] * su1_, u2 = z[iu2(k)] * su2_;
    const double tk = node_time(k), tk1 = node_time(k + 1);
    jac.block(ns_ * k, ix(k, 0), ns_, ns_) =
        -id - (h_ / 2.0) * dynamics_jac_state(tk, xk, u1, u2);
    jac.block(ns_ * k, ix(k + 1, 0), ns_, ns_) =
        id - (h_ / 2.0) * dynamics_jac_state(tk1, xk1, u1, u2);
    jac.block(ns_ * k, iu1(k), ns_, 1) =
        -(h_ / 2.0) *
        (dynamics_jac_u1(tk, xk) + dynamics_jac_u1(tk1, xk1)) * su1_;
    jac.block(ns_ * k, iu2(k), ns_, 1) =
        -(h_ / 2.0) *
        (dynamics_jac_u2(tk, xk) + dynamics_jac_u2(tk1, xk1)) * su2_;
  }
  return jac;
}

Eigen::VectorXd Transcription::inequality(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g(num_ineq());
  for (int k = 0; k <= n_; ++k) {
    const double U = z[ix(k, 0)], E = z[ix(k, 1)];
    g[k] = U / (U + E) - (prob_.rate_cap - rate_margin_);
  }
  const double total = (z[ix(n_, 0)] + z[ix(n_, 1)]) * sx_;
  g[n_ + 1] = (prob_.terminal_min + terminal_margin_ - total) / sx_;
  g[n_ + 2] = (total - prob_.terminal_max + terminal_margin_) / sx_;
  return g;
}

Eigen::MatrixXd Transcription::inequality_jacobian(
    const Eigen::VectorXd& z) const {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(num_ineq(), nz_);
  for (int k = 0; k <= n_; ++k) {
    const double U = z[ix(k, 0)], E = z[ix(k, 1)];
    const double s2 = (U + E) * (U + E);
    jac(k, ix(k, 0)) = E / s2;
    jac(k, ix(k, 1)) = -U / s2;
  }
  jac(n_ + 1, ix(n_, 0)) = -1.0;
  jac(n_ + 1, ix(n_, 1)) = -1.0;
  jac(n_ + 2, ix(n_, 0)) = 1.0;
  jac(n_ + 2, ix(n_, 1)) = 1.0;
  return jac;
}

Eigen::VectorXd Transcription::rollout(const std::vector<double>& u1,
                                       const std::vector<double>& u2) const {
  if (static_cast<int>(u1.size()) != n_ || static_cast<int>(u2.size()) != n_) {
    throw InvalidInput("rollout: control series length must equal intervals");
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nz_);
  Eigen::VectorXd x(ns_);
  x[0] = prob_.initial.U / sx_;
  x[1] = prob_.initial.E / sx_;
  if (ns_ == 3) x[2] = 0.0;
  z.segment(ix(0, 0), ns_) = x;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ns_, ns_);
  for (int k = 0; k < n_; ++k) {
    z[iu1(k)] = u1[static_cast<std::size_t>(k)] / su1_;
    z[iu2(k)] = u2[static_cast<std::size_t>(k)] / su2_;
    const double tk = node_time(k), tk1 = node_time(k + 1);
    const Eigen::VectorXd fk =
        dynamics(tk, x, u1[static_cast<std::size_t>(k)],
                 u2[static_cast<std::size_t>(k)]);
    // Implicit trapezoid step; the dynamics are affine in the state for
    // fixed controls, so Newton converges in one or two iterations.
    Eigen::VectorXd xn = x + h_ * fk;
    for (int it = 0; it < 50; ++it) {
      const Eigen::VectorXd fn =
          dynamics(tk1, xn, u1[static_cast<std::size_t>(k)],
                   u2[static_cast<std::size_t>(k)]);
      const Eigen::VectorXd res = xn - x - (h_ / 2.0) * (fk + fn);
      if (!res.allFinite()) {
        throw BlowUpError("rollout: non-finite trajectory", tk);
      }
      if (res.lpNorm<Eigen::Infinity>() < 1e-14) break;
      const Eigen::MatrixXd jm =
          id - (h_ / 2.0) * dynamics_jac_state(
                                tk1, xn, u1[static_cast<std::size_t>(k)],
                                u2[static_cast<std::size_t>(k)]);
      xn -= jm.partialPivLu().solve(res);
    }
    x = xn;
    z.segment(ix(k + 1, 0), ns_) = x;
  }
  return z;
}

Eigen::VectorXd Transcription::initial_guess() const {
  const std::vector<double> zero(static_cast<std::size_t>(n_), 0.0);
  Eigen::VectorXd z = rollout(zero, zero);
  // Warm start: where the zero-control path violates the rate cap, push u1
  // to its upper bound on the adjacent interval.
  const Eigen::VectorXd g = inequality(z);
  for (int k = 0; k < n_; ++k) {
    if (g[k] > 0.0 || g[k + 1] > 0.0) z[iu1(k)] = ub_[iu1(k)];
  }
  return z;
}

OcpSolution Transcription::extract(const Eigen::VectorXd& z) const {
  OcpSolution sol;
  sol.times.reserve(n_ + 1);
  sol.U.reserve(n_ + 1);
  sol.E.reserve(n_ + 1);
  for (int k = 0; k <= n_; ++k) {
    sol.times.push_back(node_time(k));
    sol.U.push_back(z[ix(k, 0)] * sx_);
    sol.E.push_back(z[ix(k, 1)] * sx_);
  }
  for (int k = 0; k < n_; ++k) {
    sol.u1.push_back(z[iu1(k)] * su1_);
    sol.u2.push_back(z[iu2(k)] * su2_);
  }
  sol.objective = objective(z) * f_scale_;
  sol.max_defect = equality(z).lpNorm<Eigen::Infinity>();
  double path = 0.0;
  for (int k = 0; k <= n_; ++k) {
    path = std::max(path, sol.U[static_cast<std::size_t>(k)] /
                              (sol.U[static_cast<std::size_t>(k)] +
                               sol.E[static_cast<std::size_t>(k)]) -
                        prob_.rate_cap);
  }
  sol.max_path_violation = path;
  const double total = sol.U.back() + sol.E.back();
  sol.max_terminal_violation =
      std::max({0.0, (prob_.terminal_min - total) / sx_,
                (total - prob_.terminal_max) / sx_});
  return sol;
}

// ---------------------------------------------------------------------------
// Augmented-Lagrangian solver with a projected L-BFGS inner loop.

class AugLagSolver {
 public:
  AugLagSolver(const Transcription& tr, const SolverOptions& opts)
      : tr_(tr), opts_(opts), lb_(tr.lower_bounds()), ub_(tr.upper_bounds()) {}

  OcpSolution run();

 private:
  struct Multipliers {
    Eigen::VectorXd lambda;  // equalities
    Eigen::VectorXd nu;      // inequalities, >= 0
    double mu = 10.0;
  };

  Eigen::VectorXd project(const Eigen::VectorXd& z) const {
    return z.cwiseMax(lb_).cwiseMin(ub_);
  }

  double merit(const Eigen::VectorXd& z, const Multipliers& m) const {
    const Eigen::VectorXd c = tr_.equality(z);
    const Eigen::VectorXd g = tr_.inequality(z);
    double val = internal_objective(z) + m.lambda.dot(c) +
                 0.5 * m.mu * c.squaredNorm();
    for (int j = 0; j < g.size(); ++j) {
      const double t = std::max(0.0, m.nu[j] + m.mu * g[j]);
      val += (t * t - m.nu[j] * m.nu[j]) / (2.0 * m.mu);
    }
    return val;
  }

  // Objective without the constant reporting offset, so that offset choices
  // cannot perturb the iteration.
  double internal_objective(const Eigen::VectorXd& z) const {
    const auto& prob = tr_.problem();
    const double offset = prob.weight_state * prob.reference_level() *
                          (prob.t_end - prob.t_start) / tr_.objective_scale();
    return tr_.objective(z) + offset;
  }

  Eigen::VectorXd merit_gradient(const Eigen::VectorXd& z,
                                 const Multipliers& m) const;

  double projected_gradient_norm(const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& grad) const {
    return (project(z - grad) - z).lpNorm<Eigen::Infinity>();
  }

  long inner_solve(Eigen::VectorXd& z, const Multipliers& m, double tol,
                   long budget, double* pg_out);

  const Transcription& tr_;
  SolverOptions opts_;
  Eigen::VectorXd lb_, ub_;
};

Eigen::VectorXd AugLagSolver::merit_gradient(const Eigen::VectorXd& z,
                                             const Multipliers& m) const {
  Eigen::VectorXd grad = tr_.objective_gradient(z);
  const Eigen::VectorXd c = tr_.equality(z);
  const Eigen::VectorXd g = tr_.inequality(z);
  const Eigen::VectorXd weq = m.lambda + m.mu * c;
  Eigen::VectorXd wineq(g.size());
  for (int j = 0; j < g.size(); ++j) {
    wineq[j] = std::max(0.0, m.nu[j] + m.mu * g[j]);
  }
  grad += tr_.equality_jacobian(z).transpose() * weq;
  grad += tr_.inequality_jacobian(z).transpose() * wineq;
  return grad;
}

long AugLagSolver::inner_solve(Eigen::VectorXd& z, const Multipliers& m,
                               double tol, long budget, double* pg_out) {
  constexpr int kMemory = 15;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)

  double f = merit(z, m);
  Eigen::VectorXd grad = merit_gradient(z, m);
  long iters = 0;
  double pg = projected_gradient_norm(z, grad);
  const double bound_eps = 1e-12;

  while (pg > tol && iters < budget) {
    // Variables pinned at a bound with the gradient pushing outward are
    // frozen for this iteration; the quasi-Newton model lives on the free
    // subspace only.
    Eigen::VectorXd gfree = grad;
    for (int i = 0; i < z.size(); ++i) {
      const bool at_lo = z[i] <= lb_[i] + bound_eps && grad[i] > 0.0;
      const bool at_hi = z[i] >= ub_[i] - bound_eps && grad[i] < 0.0;
      if (at_lo || at_hi) gfree[i] = 0.0;
    }

    // Two-loop recursion on the free gradient.
    Eigen::VectorXd d = -gfree;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      const auto& [s, y] = history[i];
      alpha[i] = s.dot(d) / s.dot(y);
      d -= alpha[i] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      d *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& [s, y] = history[i];
      const double beta = y.dot(d) / s.dot(y);
      d += (alpha[i] - beta) * s;
    }
    for (int i = 0; i < z.size(); ++i) {
      if (gfree[i] == 0.0 && grad[i] != 0.0) d[i] = 0.0;
    }
    if (d.dot(grad) >= 0.0) {
      // Curvature model produced an ascent direction; fall back.
      d = -gfree;
      history.clear();
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd z_new, grad_new;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      z_new = project(z + step * d);
      const Eigen::VectorXd dz = z_new - z;
      const double directional = grad.dot(dz);
      if (directional >= 0.0 || dz.lpNorm<Eigen::Infinity>() == 0.0) {
        step *= 0.5;
        continue;
      }
      f_new = merit(z_new, m);
      if (f_new <= f + 1e-4 * directional) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (history.empty()) break;  // stalled even on steepest descent
      history.clear();
      continue;
    }

    grad_new = merit_gradient(z_new, m);
    const Eigen::VectorXd s = z_new - z;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > kMemory) history.pop_front();
    }
    z = std::move(z_new);
    f = f_new;
    grad = std::move(grad_new);
    pg = projected_gradient_norm(z, grad);
    ++iters;
  }
  if (pg_out) *pg_out = pg;
  return iters;
}

OcpSolution AugLagSolver::run() {
  Eigen::VectorXd z = tr_.initial_guess();

  Multipliers m;
  m.lambda = Eigen::VectorXd::Zero(tr_.num_eq());
  m.nu = Eigen::VectorXd::Zero(tr_.num_ineq());
  m.mu = 10.0;

  double omega = 1e-2;  // inner tolerance
  double eta = 1e-3;    // feasibility target
  long inner_total = 0;
  double pg = std::numeric_limits<double>::infinity();
  std::vector<std::string> log;
  bool converged = false;
  int outer = 0;

  for (; outer < opts_.max_outer; ++outer) {
    const long budget = opts_.max_inner_total - inner_total;
    if (budget <= 0) break;
    inner_total += inner_solve(z, m, omega, budget, &pg);

    const Eigen::VectorXd c = tr_.equality(z);
    const Eigen::VectorXd g = tr_.inequality(z);
    const double eq_viol = c.lpNorm<Eigen::Infinity>();
    const double ineq_viol = g.cwiseMax(0.0).lpNorm<Eigen::Infinity>();
    const double viol = std::max(eq_viol, ineq_viol);

    {
      std::ostringstream line;
      line << "outer " << outer << ": mu=" << m.mu << " viol=" << viol
           << " pg=" << pg << " J=" << tr_.objective(z) * tr_.objective_scale();
      log.push_back(line.str());
    }

    if (viol <= opts_.feas_tol && pg <= opts_.kkt_tol && omega <= opts_.kkt_tol) {
      converged = true;
      break;
    }

    if (viol <= std::max(eta, opts_.feas_tol)) {
      m.lambda += m.mu * c;
      for (int j = 0; j < g.size(); ++j) {
        m.nu[j] = std::max(0.0, m.nu[j] + m.mu * g[j]);
      }
      eta = std::max(eta / 5.0, 0.1 * opts_.feas_tol);
      omega = std::max(omega / 5.0, opts_.kkt_tol);
    } else {
      m.mu = std::min(m.mu * 10.0, 1e12);
      omega = std::max(omega / 2.0, opts_.kkt_tol);
    }
  }

  // Feasibility polish: re-roll the states from the solved controls so the
  // reported trajectory satisfies the discrete dynamics to machine
  // precision.
  OcpSolution raw = tr_.extract(z);
  Eigen::VectorXd z_polished;
  try {
    z_polished = tr_.rollout(raw.u1, raw.u2);
  } catch (const BlowUpError&) {
    z_polished = z;
  }
  OcpSolution sol = tr_.extract(z_polished);
  sol.kkt_residual = pg;
  sol.outer_iterations = outer + 1;
  sol.inner_iterations = inner_total;
  sol.iteration_log = std::move(log);

  const bool feasible = sol.max_defect <= opts_.feas_tol &&
                        sol.max_path_violation <= opts_.feas_tol &&
                        sol.max_terminal_violation <= opts_.feas_tol;
  sol.converged = converged && feasible;
  if (!converged) {
    sol.message = "not converged: kkt/feasibility targets not met within "
                  "iteration budget";
  } else if (!feasible) {
    sol.message = "solver converged but polished trajectory violates "
                  "constraints beyond tolerance";
  } else {
    sol.message = "converged";
  }
  return sol;
}

OcpSolution solve(const OcpProblem& prob, const SolverOptions& opts) {
  Transcription tr(prob);
  // Tighten path/terminal constraints slightly inside the solver so the
  // exact-rollout polish cannot push the reported trajectory out of the
  // feasible set at reporting tolerance.
  tr.set_constraint_margin(2e-7 * prob.rate_cap, 100.0);
  AugLagSolver solver(tr, opts);
  return solver.run();
}

PolicyEvaluation evaluate_policy(const OcpProblem& prob,
                                 const std::vector<double>& u1,
                                 const std::vector<double>& u2) {
  Transcription tr(prob);
  const Eigen::VectorXd z = tr.rollout(u1, u2);
  const OcpSolution sol = tr.extract(z);
  PolicyEvaluation ev;
  ev.times = sol.times;
  ev.U = sol.U;
  ev.E = sol.E;
  ev.objective = sol.objective;
  ev.max_path_violation = sol.max_path_violation;
  ev.max_terminal_violation = sol.max_terminal_violation;
  return ev;
}

std::vector<double> control_cost_series(const OcpSolution& sol, double B,
                                        double C) {
  std::vector<double> cost;
  cost.reserve(sol.u1.size());
  for (std::size_t k = 0; k < sol.u1.size(); ++k) {
    cost.push_back(B * sol.u1[k] + C * sol.u2[k]);
  }
  return cost;
}

}  // namespace unemp
