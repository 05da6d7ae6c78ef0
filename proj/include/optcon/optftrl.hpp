#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

#include "optcon/costs.hpp"
#include "optcon/lti_system.hpp"
#include "optcon/oracle.hpp"

namespace optcon {

// Running account of the witnessed forecast errors Delta_1, Delta_2, ...
// (one per feedback slot, pushed in slot order).  It maintains, without
// rescanning history:
//   * max_window():  max over j of the trailing-window sums
//                    Delta_{j-d+1} + ... + Delta_j, for windows ending
//                    strictly before the latest entry (truncated at the
//                    first slot while the window is still filling), and
//   * sum_squares(): sum of all Delta_i^2.
// The regularizer strength derived from these is
//   lambda = (4 max_window + sqrt(5) sqrt(sum_squares)) / kappa_m,
// which is non-decreasing over time and zero iff every witnessed error is
// zero (the memoryless d = 0 case has empty windows, killing the max term).
class ErrorLedger {
 public:
  explicit ErrorLedger(int window);

  void push(double delta);

  double max_window() const { return max_win_; }
  double sum_squares() const { return sum_sq_; }
  int count() const { return count_; }
  const std::vector<double>& deltas() const { return deltas_; }

  double lambda(double kappa_m) const;

 private:
  int window_;
  std::deque<double> tail_;  // the last `window_` entries
  double tail_sum_ = 0.0;
  double max_win_ = 0.0;
  double sum_sq_ = 0.0;
  int count_ = 0;
  std::vector<double> deltas_;  // full history, kept for reporting/inspection
};

// Exact minimizer of <theta, M> + (lambda / 2) ||M||_F^2 over ||M||_F <= kappa_m:
// -theta / lambda when that is feasible, otherwise the ball boundary point
// -kappa_m theta / ||theta|| (zero when theta itself vanishes).
Eigen::MatrixXd ftrl_step(const Eigen::MatrixXd& theta, double lambda, double kappa_m);

struct HintMatrix {
  Eigen::MatrixXd H;
  int slot = 0;  // the decision slot this hint stands in for
};

// Diagnostics for one processed slot t.
struct SlotUpdate {
  int slot = 0;
  bool has_feedback = false;  // a forecast error became measurable this slot
  double delta = 0.0;         // Delta_{t-d}: aggregate error of the hint used at t-d
  double error_sum = 0.0;     // sum of per-term forecast errors behind delta
  double lambda_next = 0.0;   // regularizer strength chosen for slot t+1
  double policy_norm = 0.0;   // ||M_{t+1}||_F
  bool oracle_hit = false;    // freshest forecast (next slot's cost) was exact
};

// Optimistic follow-the-regularized-leader over disturbance-action policies.
//
// Per slot t the controller: plays u_t = M_t window_{t-1}; banks the exact
// decision gradient G_{t-d} once its last level share is revealed; measures
// the error Delta_{t-d} of the hint it acted on d slots ago and re-tunes the
// regularizer from the error ledger; folds the freshest forecasts into a
// hint H_{t+1} for the cost mass the next decision will be responsible for
// but cannot yet see; and solves the regularized leader problem
//   M_{t+1} = argmin_{||M|| <= kappa_m} <G_{1:t-d} + H_{t+1}, M> + (lambda/2) ||M||^2.
//
// The hint combines, for each of the d+1 in-flight decisions, the level
// shares already observed with forecasts for the rest, so only cost
// parameters are ever predicted; every disturbance window in it is observed.
class OptFtrlController {
 public:
  OptFtrlController(const LtiSystem& sys, int p, int d, double kappa_m, int horizon);

  // u_t for the current slot (depends only on already-observed disturbances).
  Eigen::VectorXd action() const;

  // Feed the slot-t observations plus the forecast batch issued for slot t+1;
  // advances the controller to slot t+1.
  SlotUpdate observe(const LinearCost& cost, const Eigen::VectorXd& w,
                     const PredictionBatch& next_batch);

  int slot() const { return slot_; }
  const Eigen::MatrixXd& policy() const { return M_; }
  double lambda() const { return lambda_; }
  double kappa_m() const { return kappa_m_; }
  int memory_d() const { return d_; }
  int memory_p() const { return p_; }
  const ErrorLedger& ledger() const { return ledger_; }

  // Hint for decision slot `target` assembled from the observed history and
  // the given forecast batch (which must be issued for `target`).  Observed
  // terms whose cost slot is not actually recorded yet are logic errors.
  HintMatrix build_hint(int target, const PredictionBatch& batch) const;

  // Exact decision gradient G_s = sum_i (level-i share of slot s+i), from
  // observed data only; requires every touched cost slot to be recorded.
  Eigen::MatrixXd recorded_gradient(int s) const;

  // Sum G_{max(1, target-d)} + ... + G_{target}: what the hint for `target`
  // stood in for.  Used to cross-check the error accounting.
  Eigen::MatrixXd gradient_window_sum(int target) const;

 private:
  struct PendingHint {
    int target = 0;
    Eigen::MatrixXd H;
    std::vector<PartialGradient> forecast_terms;
  };

  PendingHint assemble_hint(int target, const PredictionBatch& batch) const;
  Eigen::VectorXd window_ending_at(int lag) const;
  Eigen::MatrixXd zero_policy() const;

  LtiSystem sys_;
  MatrixPowerCache pows_;
  int p_;
  int d_;
  double kappa_m_;
  int horizon_;

  int slot_ = 1;
  Eigen::MatrixXd M_;
  double lambda_ = 0.0;
  Eigen::MatrixXd grad_sum_;  // G_{1:t-d}, kept as a running sum
  std::vector<LinearCost> costs_;
  std::vector<Eigen::VectorXd> w_;
  std::deque<PendingHint> pending_;
  ErrorLedger ledger_;
};

}  // namespace optcon
