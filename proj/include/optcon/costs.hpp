#pragma once

#include <Eigen/Dense>
#include <vector>

#include "optcon/lti_system.hpp"

namespace optcon {

// Per-slot linear cost c_t(x, u) = <alpha, x> + <beta, u>, revealed only
// after the action for the slot has been committed.
struct LinearCost {
  Eigen::VectorXd alpha;  // state price
  Eigen::VectorXd beta;   // action price
  int slot = 0;
};

// Cost and disturbance sequences for slots 1..T (stored at index t-1).
struct Trace {
  std::vector<LinearCost> costs;
  std::vector<Eigen::VectorXd> w;

  int horizon() const { return static_cast<int>(costs.size()); }
};

double eval_cost(const LinearCost& c, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

// w_s with the convention that slots outside the recorded range are zero.
Eigen::VectorXd disturbance_at(const std::vector<Eigen::VectorXd>& w, int s, int dx);

// Stacked disturbance window (w_s, w_{s-1}, ..., w_{s-p+1}) in R^{dx*p}.
// Entries for non-positive or unrecorded slots are zero, so the result always
// satisfies ||window|| <= sqrt(p) * w_max.
Eigen::VectorXd stacked_window(const std::vector<Eigen::VectorXd>& w, int s, int p, int dx);

// Lag bookkeeping for the level-i share of the slot-t cost.  The level-0
// share prices the action (window ending at t-1); the level-i share for
// i >= 1 prices the disturbance that entered the state i slots ago (window
// ending at t-i-1 plus the unweighted disturbance w_{t-i}).  Keeping these
// two maps here is what keeps every off-by-one in the project in one place.
int window_lag(int level, int slot);
int single_lag(int level, int slot);

// Value of the level-i share of the slot cost under policy M:
//   level 0:    <beta, M window>
//   level i>=1: <alpha, A^{i-1} (B M window + w_single)>
// The share is affine in M; w_single is ignored for level 0.
double partial_value(int level, const LinearCost& c, const LtiSystem& sys,
                     const MatrixPowerCache& pows, const Eigen::VectorXd& window,
                     const Eigen::VectorXd& w_single, const Eigen::MatrixXd& M);

// Gradient of partial_value with respect to M (constant in M):
//   level 0:    beta window^T
//   level i>=1: B^T (A^{i-1})^T alpha window^T
Eigen::MatrixXd partial_gradient(int level, const LinearCost& c, const LtiSystem& sys,
                                 const MatrixPowerCache& pows, const Eigen::VectorXd& window);

// One level share of a decision gradient, tagged with the slot whose cost it
// prices and the attenuation level it entered the state at.
struct PartialGradient {
  Eigen::MatrixXd value;
  int level = 0;
  int slot = 0;
};

// Analytic ceiling on ||partial_gradient(level)||_F:
//   level 0:    beta_max * p * w_max
//   level i>=1: alpha_max * kappa_b * p * w_max * (1 - delta)^(i-1)
// Monotone non-increasing for level >= 1.
double gradient_bound(int level, const LtiSystem& sys, double alpha_max, double beta_max, int p);

// Sum of the d+1 level shares that one decision is responsible for.  The
// parts must carry levels 0..d in order; a gap is a logic error.
Eigen::MatrixXd forward_gradient(const std::vector<PartialGradient>& parts);

}  // namespace optcon
