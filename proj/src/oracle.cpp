#include "optcon/oracle.hpp"

#include <stdexcept>

namespace optcon {

OracleKind parse_oracle_kind(const std::string& token) {
  if (token == "perfect") return OracleKind::Perfect;
  if (token == "zero") return OracleKind::Zero;
  if (token == "bernoulli") return OracleKind::Bernoulli;
  throw std::invalid_argument("unknown oracle '" + token +
                              "' (expected perfect, zero or bernoulli)");
}

std::string oracle_token(OracleKind kind) {
  switch (kind) {
    case OracleKind::Perfect: return "perfect";
    case OracleKind::Zero: return "zero";
    case OracleKind::Bernoulli: return "bernoulli";
  }
  throw std::logic_error("oracle_token: unhandled kind");
}

const Eigen::VectorXd& PredictionBatch::alpha_at(int slot) const {
  if (!covers(slot)) throw std::logic_error("PredictionBatch: slot outside forecast range");
  return alpha[static_cast<size_t>(slot - issue_slot)];
}

const Eigen::VectorXd& PredictionBatch::beta_at(int slot) const {
  if (!covers(slot)) throw std::logic_error("PredictionBatch: slot outside forecast range");
  return beta[static_cast<size_t>(slot - issue_slot)];
}

PredictionOracle::PredictionOracle(OracleKind kind, double rho, std::uint64_t seed, int depth)
    : kind_(kind), rho_(rho), depth_(depth), rng_(seed) {
  if (depth < 0) throw std::invalid_argument("oracle: forecast depth must be >= 0");
  if (kind == OracleKind::Bernoulli && !(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("oracle: rho must lie in [0, 1]");
}

PredictionBatch PredictionOracle::predict(int issue_slot, const Trace& truth) {
  if (issue_slot < 1) throw std::invalid_argument("oracle: slots are 1-based");
  const int T = truth.horizon();
  if (T < 1) throw std::invalid_argument("oracle: cannot forecast an empty plan");
  const int dx = static_cast<int>(truth.costs[0].alpha.size());
  const int du = static_cast<int>(truth.costs[0].beta.size());
  if (truth_has_beta_ < 0) {
    truth_has_beta_ = 0;
    for (const auto& c : truth.costs)
      if (c.beta.norm() > 0.0) { truth_has_beta_ = 1; break; }
  }

  PredictionBatch batch;
  batch.issue_slot = issue_slot;
  batch.alpha.reserve(static_cast<size_t>(depth_) + 1);
  batch.beta.reserve(static_cast<size_t>(depth_) + 1);
  batch.hit.reserve(static_cast<size_t>(depth_) + 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);

  for (int h = 0; h <= depth_; ++h) {
    const int slot = issue_slot + h;
    if (slot > T) {  // beyond the horizon every cost is zero, so say so
      batch.alpha.push_back(Eigen::VectorXd::Zero(dx));
      batch.beta.push_back(Eigen::VectorXd::Zero(du));
      batch.hit.push_back(1);
      continue;
    }
    const LinearCost& c = truth.costs[static_cast<size_t>(slot - 1)];
    switch (kind_) {
      case OracleKind::Perfect:
        batch.alpha.push_back(c.alpha);
        batch.beta.push_back(c.beta);
        batch.hit.push_back(1);
        break;
      case OracleKind::Zero:
        batch.alpha.push_back(Eigen::VectorXd::Zero(dx));
        batch.beta.push_back(Eigen::VectorXd::Zero(du));
        batch.hit.push_back(c.alpha.norm() == 0.0 && c.beta.norm() == 0.0 ? 1 : 0);
        break;
      case OracleKind::Bernoulli: {
        if (coin(rng_) < rho_) {
          batch.alpha.push_back(c.alpha);
          batch.beta.push_back(c.beta);
          batch.hit.push_back(1);
        } else {
          Eigen::VectorXd a(dx);
          for (int k = 0; k < dx; ++k) a(k) = noise(rng_);
          Eigen::VectorXd b = Eigen::VectorXd::Zero(du);
          if (truth_has_beta_ == 1)
            for (int k = 0; k < du; ++k) b(k) = noise(rng_);
          batch.alpha.push_back(std::move(a));
          batch.beta.push_back(std::move(b));
          batch.hit.push_back(0);
        }
        break;
      }
    }
  }
  return batch;
}

}  // namespace optcon
