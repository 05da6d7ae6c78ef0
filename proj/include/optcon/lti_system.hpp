#pragma once

#include <Eigen/Dense>
#include <vector>

namespace optcon {

// Discrete-time linear plant
//
//   x_{t+1} = A x_t + B u_t + w_t,   x_1 = 0,  w_t = 0 for t <= 0,
//
// driven by bounded adversarial disturbances.  The declared constants are the
// contract everything downstream relies on: ||A||_op <= 1 - delta with
// delta in (0, 1], ||B||_F <= kappa_b, and ||w_t||_2 <= w_max for every slot.
struct LtiSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double delta = 0.0;    // stability margin of A
  double kappa_b = 0.0;  // Frobenius bound on B
  double w_max = 0.0;    // Euclidean bound on each disturbance

  int dx() const { return static_cast<int>(A.rows()); }
  int du() const { return static_cast<int>(B.cols()); }

  // Throws std::invalid_argument when shapes are inconsistent or a declared
  // bound does not actually hold for A or B.
  void validate() const;
};

// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);

// One plant transition.  Dimension mismatches are configuration errors.
Eigen::VectorXd step(const LtiSystem& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& w);

// Immutable table of A^0 .. A^max_power.  Every component that unrolls the
// dynamics shares one of these instead of re-multiplying matrix powers.
class MatrixPowerCache {
 public:
  MatrixPowerCache(const Eigen::MatrixXd& a, int max_power);

  // A^i for 0 <= i <= max_power(); anything else is a logic error.
  const Eigen::MatrixXd& operator()(int i) const;

  int max_power() const { return static_cast<int>(powers_.size()) - 1; }

 private:
  std::vector<Eigen::MatrixXd> powers_;
};

}  // namespace optcon
