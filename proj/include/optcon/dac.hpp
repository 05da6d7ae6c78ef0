#pragma once

#include <Eigen/Dense>
#include <vector>

#include "optcon/costs.hpp"
#include "optcon/lti_system.hpp"

namespace optcon {

// Disturbance-action policy: the action is a fixed linear map of the last p
// observed disturbances, u_t = M (w_{t-1}, ..., w_{t-p}).  The policy class
// is the Frobenius ball ||M||_F <= kappa_m.
struct DacPolicy {
  Eigen::MatrixXd M;  // du x (dx * p)
  int p = 1;
  double kappa_m = 1.0;

  bool feasible(double tol = 1e-12) const { return M.norm() <= kappa_m + tol; }
};

// u = M window.  By Cauchy-Schwarz ||u|| <= ||M||_F ||window||, so feasible
// policies act within kappa_m * sqrt(p) * w_max.
Eigen::VectorXd compute_action(const Eigen::MatrixXd& M, const Eigen::VectorXd& window);

// Euclidean (Frobenius) projection onto the radius-ball; identity inside it.
Eigen::MatrixXd project_to_ball(const Eigen::MatrixXd& M, double radius);

// State reconstructed from the last d slots only, pretending everything
// before them never happened:
//
//   x^_t = sum_{i=0}^{d-1} A^i (B M_{t-i-1} window_{t-i-2} + w_{t-i-1}),
//
// with M_s treated as absent for s < 1.  policies[k] holds M_{k+1}.  Exact
// for t <= d + 1; afterwards the discarded prefix decays geometrically, so
// ||x^_t - x_t|| <= (z / delta) (1 - delta)^d with z = w_max (kappa_b kappa_m p + 1).
Eigen::VectorXd truncated_state(const LtiSystem& sys, const MatrixPowerCache& pows,
                                const std::vector<Eigen::MatrixXd>& policies,
                                const std::vector<Eigen::VectorXd>& w, int t, int d, int p);

// z = w_max (kappa_b kappa_m p + 1): the per-slot mass the truncation discards.
double memory_z(const LtiSystem& sys, double kappa_m, int p);

// Smallest memory length d making the truncation error of every slot at most
// epsilon / T:  d = max(0, ceil((1/delta) ln(z T / (delta epsilon)))).
int compute_memory_d(double delta, double z, double horizon, double epsilon);
int compute_memory_d(const LtiSystem& sys, double kappa_m, int p, int horizon, double epsilon);

}  // namespace optcon
