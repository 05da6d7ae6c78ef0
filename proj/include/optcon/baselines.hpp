#pragma once

#include <Eigen/Dense>
#include <vector>

#include "optcon/costs.hpp"
#include "optcon/dac.hpp"
#include "optcon/lti_system.hpp"

namespace optcon {

// One projected-gradient step on the truncated slot loss: the loss of the
// current slot's cost under the fiction that the same M produced the last
// d+1 actions.  That loss is affine in M, so its gradient is the sum of the
// level shares of the *current* slot, all of whose windows are observed.
Eigen::MatrixXd gpc_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& gradient,
                         double eta, double kappa_m);

// Gradient-perturbation controller: online projected gradient descent over
// the same policy ball, with the fixed step size eta = kappa_m / (g_max sqrt(T)).
class GpcController {
 public:
  GpcController(const LtiSystem& sys, int p, int d, double kappa_m, double g_max, int horizon);

  Eigen::VectorXd action() const;
  void observe(const LinearCost& cost, const Eigen::VectorXd& w);

  int slot() const { return slot_; }
  const Eigen::MatrixXd& policy() const { return M_; }
  double step_size() const { return eta_; }

 private:
  LtiSystem sys_;
  MatrixPowerCache pows_;
  int p_;
  int d_;
  double kappa_m_;
  double eta_;

  int slot_ = 1;
  Eigen::MatrixXd M_;
  std::vector<Eigen::VectorXd> w_;
};

// The best fixed policy in hindsight and the machinery to find it.  The
// total cost of a static M is affine: J(M) = <theta, M> + J(0), where theta
// accumulates how every slot's price vector sees every disturbance window
// through the dynamics.  The minimizer over the ball is therefore the
// boundary point -kappa_m theta / ||theta|| (zero when theta vanishes).
struct BenchmarkPolicy {
  Eigen::MatrixXd M_star;
  Eigen::MatrixXd theta;  // gradient of the affine total-cost map
  double total_cost = 0.0;
};

// Per-slot costs of replaying a fixed M against the exact dynamics from x_1 = 0.
std::vector<double> rollout_static_costs(const LtiSystem& sys, const Eigen::MatrixXd& M,
                                         const Trace& trace, int p);

// theta is accumulated with a backward recursion over price vectors
// (q_tau = alpha_{tau+2} + A^T q_{tau+1}), so the whole computation is
// O(T) matrix-vector work rather than O(T^2).
BenchmarkPolicy optimal_static_policy(const LtiSystem& sys, const Trace& trace,
                                      double kappa_m, int p);

}  // namespace optcon
