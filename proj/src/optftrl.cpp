#include "optcon/optftrl.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace optcon {

ErrorLedger::ErrorLedger(int window) : window_(window) {
  if (window < 0) throw std::invalid_argument("ErrorLedger: window must be >= 0");
}

void ErrorLedger::push(double delta) {
  if (delta < 0.0) throw std::invalid_argument("ErrorLedger: errors are norms, must be >= 0");
  // The trailing window currently ends at the previous entry; windows ending
  // before the newest entry are exactly the ones the max may range over.
  max_win_ = std::max(max_win_, tail_sum_);
  if (window_ > 0) {
    tail_.push_back(delta);
    tail_sum_ += delta;
    if (static_cast<int>(tail_.size()) > window_) {
      tail_sum_ -= tail_.front();
      tail_.pop_front();
    }
  }
  sum_sq_ += delta * delta;
  deltas_.push_back(delta);
  ++count_;
}

double ErrorLedger::lambda(double kappa_m) const {
  if (!(kappa_m > 0.0)) throw std::invalid_argument("ErrorLedger: kappa_m must be positive");
  return (4.0 * max_win_ + std::sqrt(5.0) * std::sqrt(sum_sq_)) / kappa_m;
}

Eigen::MatrixXd ftrl_step(const Eigen::MatrixXd& theta, double lambda, double kappa_m) {
  if (!(kappa_m > 0.0)) throw std::invalid_argument("ftrl_step: kappa_m must be positive");
  const double theta_norm = theta.norm();
  if (theta_norm == 0.0) return Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
  if (lambda > 0.0) {
    // Unconstrained minimizer; the ball projection of a quadratic minimizer
    // is the rescaled boundary point, handled below when infeasible.
    if (theta_norm / lambda <= kappa_m) return -theta / lambda;
  }
  return (-kappa_m / theta_norm) * theta;
}

OptFtrlController::OptFtrlController(const LtiSystem& sys, int p, int d, double kappa_m,
                                     int horizon)
    : sys_(sys),
      pows_(sys.A, std::max(d, 1)),
      p_(p),
      d_(d),
      kappa_m_(kappa_m),
      horizon_(horizon),
      ledger_(d) {
  sys_.validate();
  if (p < 1) throw std::invalid_argument("controller: memory length p must be >= 1");
  if (d < 0) throw std::invalid_argument("controller: delay d must be >= 0");
  if (!(kappa_m > 0.0)) throw std::invalid_argument("controller: kappa_m must be positive");
  if (horizon < 0) throw std::invalid_argument("controller: horizon must be >= 0");
  M_ = zero_policy();
  grad_sum_ = zero_policy();
  costs_.reserve(static_cast<size_t>(horizon));
  w_.reserve(static_cast<size_t>(horizon));
}

Eigen::MatrixXd OptFtrlController::zero_policy() const {
  return Eigen::MatrixXd::Zero(sys_.du(), static_cast<Eigen::Index>(sys_.dx()) * p_);
}

Eigen::VectorXd OptFtrlController::window_ending_at(int lag) const {
  return stacked_window(w_, lag, p_, sys_.dx());
}

Eigen::VectorXd OptFtrlController::action() const {
  return M_ * window_ending_at(slot_ - 1);
}

Eigen::MatrixXd OptFtrlController::recorded_gradient(int s) const {
  Eigen::MatrixXd g = zero_policy();
  for (int i = 0; i <= d_; ++i) {
    const int cost_slot = s + i;
    if (cost_slot < 1 || cost_slot > horizon_) continue;
    if (cost_slot > static_cast<int>(costs_.size()))
      throw std::logic_error("recorded_gradient: cost for slot " + std::to_string(cost_slot) +
                             " not observed yet");
    g += partial_gradient(i, costs_[static_cast<size_t>(cost_slot - 1)], sys_, pows_,
                          window_ending_at(window_lag(i, cost_slot)));
  }
  return g;
}

Eigen::MatrixXd OptFtrlController::gradient_window_sum(int target) const {
  Eigen::MatrixXd g = zero_policy();
  for (int s = std::max(1, target - d_); s <= target; ++s) g += recorded_gradient(s);
  return g;
}

OptFtrlController::PendingHint OptFtrlController::assemble_hint(
    int target, const PredictionBatch& batch) const {
  if (batch.issue_slot != target)
    throw std::invalid_argument("hint: forecast batch issued for slot " +
                                std::to_string(batch.issue_slot) + ", need " +
                                std::to_string(target));
  if (batch.depth() != d_)
    throw std::invalid_argument("hint: forecast batch depth mismatch");

  PendingHint hint;
  hint.target = target;
  hint.H = zero_policy();

  // The decisions at slots target-d..target-1 are still waiting for part of
  // their cost mass.  For each, sum the level shares already revealed ...
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j <= d_ - i - 1; ++j) {
      const int s = target - d_ + i + j;
      if (s < 1) continue;  // before the first slot: zero by convention
      if (s > static_cast<int>(costs_.size()))
        throw std::logic_error("hint: share at slot " + std::to_string(s) +
                               " should already be observed (have " +
                               std::to_string(costs_.size()) + " slots)");
      hint.H += partial_gradient(j, costs_[static_cast<size_t>(s - 1)], sys_, pows_,
                                 window_ending_at(window_lag(j, s)));
    }
  }
  // ... and fill the unrevealed shares from the forecast batch.  The i = d
  // row is the full gradient forecast for the upcoming decision itself.
  for (int i = 0; i <= d_; ++i) {
    for (int j = d_ - i; j <= d_; ++j) {
      const int s = target - d_ + i + j;
      if (s > horizon_) continue;  // zero-padded beyond the horizon
      LinearCost forecast;
      forecast.slot = s;
      forecast.alpha = batch.alpha_at(s);
      forecast.beta = batch.beta_at(s);
      Eigen::MatrixXd g = partial_gradient(j, forecast, sys_, pows_,
                                           window_ending_at(window_lag(j, s)));
      hint.H += g;
      hint.forecast_terms.push_back({std::move(g), j, s});
    }
  }
  return hint;
}

HintMatrix OptFtrlController::build_hint(int target, const PredictionBatch& batch) const {
  PendingHint hint = assemble_hint(target, batch);
  return HintMatrix{std::move(hint.H), target};
}

SlotUpdate OptFtrlController::observe(const LinearCost& cost, const Eigen::VectorXd& w,
                                      const PredictionBatch& next_batch) {
  const int t = slot_;
  if (t > horizon_) throw std::logic_error("controller: observed more slots than the horizon");
  SlotUpdate up;
  up.slot = t;

  // Cost revealed; the decision gradient G_{t-d} is now complete, bank it.
  if (cost.alpha.size() != sys_.dx() || cost.beta.size() != sys_.du())
    throw std::invalid_argument("controller: cost dimension mismatch");
  costs_.push_back(cost);
  if (t - d_ >= 1) grad_sum_ += recorded_gradient(t - d_);

  // Next state observed, i.e. w_t revealed.
  if (w.size() != sys_.dx())
    throw std::invalid_argument("controller: disturbance dimension mismatch");
  w_.push_back(w);

  // The hint acted on at slot t-d can now be graded term by term.  Slot 1 was
  // played before any forecast existed, so it witnesses zero error.
  if (t - d_ >= 1) {
    up.has_feedback = true;
    if (!pending_.empty() && pending_.front().target < t - d_)
      throw std::logic_error("controller: forecast error feedback out of order");
    if (!pending_.empty() && pending_.front().target == t - d_) {
      const PendingHint& graded = pending_.front();
      Eigen::MatrixXd diff = zero_policy();
      for (const PartialGradient& term : graded.forecast_terms) {
        const Eigen::MatrixXd truth =
            partial_gradient(term.level, costs_[static_cast<size_t>(term.slot - 1)], sys_,
                             pows_, window_ending_at(window_lag(term.level, term.slot)));
        diff += truth - term.value;
        up.error_sum += (truth - term.value).norm();
      }
      up.delta = diff.norm();
      pending_.pop_front();
    }
    ledger_.push(up.delta);
  }
  lambda_ = ledger_.lambda(kappa_m_);
  up.lambda_next = lambda_;

  // Fold the fresh forecasts into the hint for the next decision and solve
  // the regularized leader problem for M_{t+1}.
  PendingHint hint = assemble_hint(t + 1, next_batch);
  M_ = ftrl_step(grad_sum_ + hint.H, lambda_, kappa_m_);
  pending_.push_back(std::move(hint));

  up.policy_norm = M_.norm();
  up.oracle_hit = !next_batch.hit.empty() && next_batch.hit[0] != 0;
  slot_ = t + 1;
  return up;
}

}  // namespace optcon
