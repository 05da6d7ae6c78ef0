#include "optcon/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace optcon {

double eval_cost(const LinearCost& c, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (c.alpha.size() != x.size() || c.beta.size() != u.size())
    throw std::invalid_argument("eval_cost: price/state or price/action dimension mismatch");
  return c.alpha.dot(x) + c.beta.dot(u);
}

Eigen::VectorXd disturbance_at(const std::vector<Eigen::VectorXd>& w, int s, int dx) {
  if (s >= 1 && s <= static_cast<int>(w.size())) return w[static_cast<size_t>(s - 1)];
  return Eigen::VectorXd::Zero(dx);
}

Eigen::VectorXd stacked_window(const std::vector<Eigen::VectorXd>& w, int s, int p, int dx) {
  if (p < 1) throw std::invalid_argument("stacked_window: p must be >= 1");
  Eigen::VectorXd window = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dx) * p);
  for (int j = 0; j < p; ++j) {
    const int slot = s - j;
    if (slot >= 1 && slot <= static_cast<int>(w.size())) {
      const Eigen::VectorXd& wj = w[static_cast<size_t>(slot - 1)];
      if (wj.size() != dx)
        throw std::invalid_argument("stacked_window: recorded disturbance has wrong dimension");
      window.segment(static_cast<Eigen::Index>(j) * dx, dx) = wj;
    }
  }
  return window;
}

int window_lag(int level, int slot) {
  if (level < 0) throw std::logic_error("window_lag: negative level");
  return level == 0 ? slot - 1 : slot - level - 1;
}

int single_lag(int level, int slot) {
  if (level < 1) throw std::logic_error("single_lag: only levels >= 1 carry a bare disturbance");
  return slot - level;
}

double partial_value(int level, const LinearCost& c, const LtiSystem& sys,
                     const MatrixPowerCache& pows, const Eigen::VectorXd& window,
                     const Eigen::VectorXd& w_single, const Eigen::MatrixXd& M) {
  if (level < 0) throw std::logic_error("partial_value: negative level");
  if (M.rows() != sys.du() || window.size() != M.cols())
    throw std::invalid_argument("partial_value: policy/window shape mismatch");
  if (level == 0) {
    if (c.beta.size() != sys.du())
      throw std::invalid_argument("partial_value: beta dimension mismatch");
    return c.beta.dot(M * window);
  }
  if (c.alpha.size() != sys.dx() || w_single.size() != sys.dx())
    throw std::invalid_argument("partial_value: alpha/disturbance dimension mismatch");
  return c.alpha.dot(pows(level - 1) * (sys.B * (M * window) + w_single));
}

Eigen::MatrixXd partial_gradient(int level, const LinearCost& c, const LtiSystem& sys,
                                 const MatrixPowerCache& pows, const Eigen::VectorXd& window) {
  if (level < 0) throw std::logic_error("partial_gradient: negative level");
  if (level == 0) {
    if (c.beta.size() != sys.du())
      throw std::invalid_argument("partial_gradient: beta dimension mismatch");
    return c.beta * window.transpose();
  }
  if (c.alpha.size() != sys.dx())
    throw std::invalid_argument("partial_gradient: alpha dimension mismatch");
  const Eigen::VectorXd lhs = sys.B.transpose() * (pows(level - 1).transpose() * c.alpha);
  return lhs * window.transpose();
}

double gradient_bound(int level, const LtiSystem& sys, double alpha_max, double beta_max,
                      int p) {
  if (level < 0) throw std::logic_error("gradient_bound: negative level");
  if (p < 1) throw std::invalid_argument("gradient_bound: p must be >= 1");
  if (level == 0) return beta_max * p * sys.w_max;
  return alpha_max * sys.kappa_b * p * sys.w_max * std::pow(1.0 - sys.delta, level - 1);
}

Eigen::MatrixXd forward_gradient(const std::vector<PartialGradient>& parts) {
  if (parts.empty()) throw std::logic_error("forward_gradient: no level shares supplied");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(parts[0].value.rows(), parts[0].value.cols());
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].level != static_cast<int>(i))
      throw std::logic_error("forward_gradient: level " + std::to_string(i) +
                             " share missing or out of order");
    if (parts[i].value.rows() != sum.rows() || parts[i].value.cols() != sum.cols())
      throw std::invalid_argument("forward_gradient: inconsistent share shapes");
    sum += parts[i].value;
  }
  return sum;
}

}  // namespace optcon
