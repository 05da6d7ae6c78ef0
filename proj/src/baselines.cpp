#include "optcon/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace optcon {

Eigen::MatrixXd gpc_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& gradient,
                         double eta, double kappa_m) {
  if (M.rows() != gradient.rows() || M.cols() != gradient.cols())
    throw std::invalid_argument("gpc_step: policy/gradient shape mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("gpc_step: step size must be positive");
  return project_to_ball(M - eta * gradient, kappa_m);
}

GpcController::GpcController(const LtiSystem& sys, int p, int d, double kappa_m, double g_max,
                             int horizon)
    : sys_(sys), pows_(sys.A, std::max(d, 1)), p_(p), d_(d), kappa_m_(kappa_m) {
  sys_.validate();
  if (p < 1) throw std::invalid_argument("gpc: memory length p must be >= 1");
  if (d < 0) throw std::invalid_argument("gpc: d must be >= 0");
  if (!(kappa_m > 0.0)) throw std::invalid_argument("gpc: kappa_m must be positive");
  if (!(g_max > 0.0)) throw std::invalid_argument("gpc: gradient scale g_max must be positive");
  if (horizon < 1) throw std::invalid_argument("gpc: horizon must be >= 1");
  eta_ = kappa_m / (g_max * std::sqrt(static_cast<double>(horizon)));
  M_ = Eigen::MatrixXd::Zero(sys_.du(), static_cast<Eigen::Index>(sys_.dx()) * p_);
  w_.reserve(static_cast<size_t>(horizon));
}

Eigen::VectorXd GpcController::action() const {
  return M_ * stacked_window(w_, slot_ - 1, p_, sys_.dx());
}

void GpcController::observe(const LinearCost& cost, const Eigen::VectorXd& w) {
  if (cost.alpha.size() != sys_.dx() || cost.beta.size() != sys_.du())
    throw std::invalid_argument("gpc: cost dimension mismatch");
  if (w.size() != sys_.dx()) throw std::invalid_argument("gpc: disturbance dimension mismatch");
  const int t = slot_;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(M_.rows(), M_.cols());
  for (int i = 0; i <= d_; ++i)
    grad += partial_gradient(i, cost, sys_, pows_,
                             stacked_window(w_, window_lag(i, t), p_, sys_.dx()));
  M_ = gpc_step(M_, grad, eta_, kappa_m_);
  w_.push_back(w);
  slot_ = t + 1;
}

std::vector<double> rollout_static_costs(const LtiSystem& sys, const Eigen::MatrixXd& M,
                                         const Trace& trace, int p) {
  const int T = trace.horizon();
  std::vector<double> costs;
  costs.reserve(static_cast<size_t>(T));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dx());
  for (int t = 1; t <= T; ++t) {
    const Eigen::VectorXd u = compute_action(M, stacked_window(trace.w, t - 1, p, sys.dx()));
    costs.push_back(eval_cost(trace.costs[static_cast<size_t>(t - 1)], x, u));
    x = step(sys, x, u, trace.w[static_cast<size_t>(t - 1)]);
  }
  return costs;
}

BenchmarkPolicy optimal_static_policy(const LtiSystem& sys, const Trace& trace,
                                      double kappa_m, int p) {
  sys.validate();
  if (!(kappa_m > 0.0)) throw std::invalid_argument("benchmark: kappa_m must be positive");
  if (p < 1) throw std::invalid_argument("benchmark: p must be >= 1");
  const int T = trace.horizon();
  const Eigen::Index cols = static_cast<Eigen::Index>(sys.dx()) * p;

  BenchmarkPolicy bench;
  bench.theta = Eigen::MatrixXd::Zero(sys.du(), cols);

  // Direct action pricing: sum_t beta_t window_{t-1}^T.
  for (int t = 1; t <= T; ++t) {
    const LinearCost& c = trace.costs[static_cast<size_t>(t - 1)];
    if (c.beta.norm() != 0.0)
      bench.theta += c.beta * stacked_window(trace.w, t - 1, p, sys.dx()).transpose();
  }

  // State pricing: the action taken after window_tau is seen by every later
  // state price through powers of A.  Accumulate those prices backward:
  // q_tau = sum_{t >= tau+2} (A^{t-tau-2})^T alpha_t.
  Eigen::VectorXd q = Eigen::VectorXd::Zero(sys.dx());
  for (int tau = T - 2; tau >= 1; --tau) {
    q = trace.costs[static_cast<size_t>(tau + 1)].alpha + sys.A.transpose() * q;
    bench.theta +=
        (sys.B.transpose() * q) * stacked_window(trace.w, tau, p, sys.dx()).transpose();
  }

  const double theta_norm = bench.theta.norm();
  bench.M_star = theta_norm == 0.0
                     ? Eigen::MatrixXd::Zero(sys.du(), cols)
                     : Eigen::MatrixXd((-kappa_m / theta_norm) * bench.theta);
  bench.total_cost = 0.0;
  for (double c : rollout_static_costs(sys, bench.M_star, trace, p)) bench.total_cost += c;
  return bench;
}

}  // namespace optcon
