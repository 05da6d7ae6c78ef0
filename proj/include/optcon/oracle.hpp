#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "optcon/costs.hpp"

namespace optcon {

enum class OracleKind { Perfect, Zero, Bernoulli };

OracleKind parse_oracle_kind(const std::string& token);
std::string oracle_token(OracleKind kind);

// Forecast of the next d+1 cost parameters.  Offset h of a batch issued for
// slot s refers to slot s + h; slots beyond the horizon are zero (costs are
// zero-padded past T, so those forecasts are exact by convention).
struct PredictionBatch {
  int issue_slot = 0;
  std::vector<Eigen::VectorXd> alpha;
  std::vector<Eigen::VectorXd> beta;
  std::vector<std::uint8_t> hit;  // forecast equals the true parameters

  int depth() const { return static_cast<int>(alpha.size()) - 1; }
  bool covers(int slot) const {
    return slot >= issue_slot && slot < issue_slot + static_cast<int>(alpha.size());
  }
  const Eigen::VectorXd& alpha_at(int slot) const;
  const Eigen::VectorXd& beta_at(int slot) const;
};

// Untrusted forecaster.  "perfect" replays the adversary's plan, "zero"
// forecasts nothing, and "bernoulli" tells the truth with probability rho
// per forecast slot, otherwise emitting componentwise uniform noise on
// [-1, 1].  One instance serves one rollout; draws are deterministic in the
// seed so replays are bit-identical.
class PredictionOracle {
 public:
  PredictionOracle(OracleKind kind, double rho, std::uint64_t seed, int depth);

  // Forecast slots issue_slot .. issue_slot + depth from the adversary plan.
  PredictionBatch predict(int issue_slot, const Trace& truth);

  OracleKind kind() const { return kind_; }
  double rho() const { return rho_; }

 private:
  OracleKind kind_;
  double rho_;
  int depth_;
  std::mt19937_64 rng_;
  int truth_has_beta_ = -1;  // lazily resolved: do any true action prices exist?
};

}  // namespace optcon
