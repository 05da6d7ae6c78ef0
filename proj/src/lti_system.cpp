#include "optcon/lti_system.hpp"

#include <stdexcept>
#include <string>

namespace optcon {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

void LtiSystem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols())
    throw std::invalid_argument("LtiSystem: A must be square and non-empty");
  if (B.rows() != A.rows() || B.cols() == 0)
    throw std::invalid_argument("LtiSystem: B must have one row per state");
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("LtiSystem: stability margin delta must lie in (0, 1]");
  if (w_max < 0.0) throw std::invalid_argument("LtiSystem: w_max must be non-negative");
  // Small slack so that systems constructed to sit exactly on a bound
  // (e.g. A scaled to spectral norm 1 - delta) survive rounding.
  const double tol = 1e-9;
  const double a_norm = spectral_norm(A);
  if (a_norm > 1.0 - delta + tol)
    throw std::invalid_argument("LtiSystem: ||A||_op = " + std::to_string(a_norm) +
                                " exceeds 1 - delta = " + std::to_string(1.0 - delta));
  if (B.norm() > kappa_b + tol)
    throw std::invalid_argument("LtiSystem: ||B||_F = " + std::to_string(B.norm()) +
                                " exceeds kappa_b = " + std::to_string(kappa_b));
}

Eigen::VectorXd step(const LtiSystem& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  if (x.size() != sys.dx() || w.size() != sys.dx() || u.size() != sys.du())
    throw std::invalid_argument("step: state/action/disturbance dimension mismatch");
  return sys.A * x + sys.B * u + w;
}

MatrixPowerCache::MatrixPowerCache(const Eigen::MatrixXd& a, int max_power) {
  if (a.rows() != a.cols()) throw std::invalid_argument("MatrixPowerCache: A must be square");
  if (max_power < 0) max_power = 0;
  powers_.reserve(static_cast<size_t>(max_power) + 1);
  powers_.push_back(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  for (int i = 1; i <= max_power; ++i) powers_.push_back(powers_.back() * a);
}

const Eigen::MatrixXd& MatrixPowerCache::operator()(int i) const {
  if (i < 0 || i > max_power())
    throw std::logic_error("MatrixPowerCache: power " + std::to_string(i) +
                           " outside cached range 0.." + std::to_string(max_power()));
  return powers_[static_cast<size_t>(i)];
}

}  // namespace optcon
