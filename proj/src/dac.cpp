#include "optcon/dac.hpp"

#include <cmath>
#include <stdexcept>

namespace optcon {

Eigen::VectorXd compute_action(const Eigen::MatrixXd& M, const Eigen::VectorXd& window) {
  if (M.cols() != window.size())
    throw std::invalid_argument("compute_action: policy/window dimension mismatch");
  return M * window;
}

Eigen::MatrixXd project_to_ball(const Eigen::MatrixXd& M, double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_to_ball: negative radius");
  const double n = M.norm();
  if (n <= radius) return M;
  return M * (radius / n);
}

Eigen::VectorXd truncated_state(const LtiSystem& sys, const MatrixPowerCache& pows,
                                const std::vector<Eigen::MatrixXd>& policies,
                                const std::vector<Eigen::VectorXd>& w, int t, int d, int p) {
  if (t < 1) throw std::invalid_argument("truncated_state: slots are 1-based");
  if (d < 0) throw std::invalid_argument("truncated_state: d must be >= 0");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dx());
  for (int i = 0; i < d; ++i) {
    const int action_slot = t - i - 1;
    Eigen::VectorXd drive = disturbance_at(w, action_slot, sys.dx());
    if (action_slot >= 1 && action_slot <= static_cast<int>(policies.size())) {
      const Eigen::MatrixXd& m = policies[static_cast<size_t>(action_slot - 1)];
      drive += sys.B * (m * stacked_window(w, action_slot - 1, p, sys.dx()));
    }
    x += pows(i) * drive;
  }
  return x;
}

double memory_z(const LtiSystem& sys, double kappa_m, int p) {
  return sys.w_max * (sys.kappa_b * kappa_m * p + 1.0);
}

int compute_memory_d(double delta, double z, double horizon, double epsilon) {
  if (!(delta > 0.0)) throw std::invalid_argument("compute_memory_d: delta must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("compute_memory_d: epsilon must be positive");
  if (!(horizon >= 1.0)) throw std::invalid_argument("compute_memory_d: horizon must be >= 1");
  if (z <= 0.0) return 0;  // nothing to remember: the plant is never driven
  const double raw = std::log(z * horizon / (delta * epsilon)) / delta;
  if (raw <= 0.0) return 0;
  return static_cast<int>(std::ceil(raw - 1e-12));
}

int compute_memory_d(const LtiSystem& sys, double kappa_m, int p, int horizon, double epsilon) {
  return compute_memory_d(sys.delta, memory_z(sys, kappa_m, p), static_cast<double>(horizon),
                          epsilon);
}

}  // namespace optcon
