#include "optcon/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace optcon {

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

double max_norm(const std::vector<Eigen::VectorXd>& phases) {
  double m = 0.0;
  for (const auto& v : phases) m = std::max(m, v.norm());
  return m;
}

const Eigen::VectorXd& phase_at(const std::vector<Eigen::VectorXd>& phases, int t, int period) {
  const size_t idx = (static_cast<size_t>(t - 1) / static_cast<size_t>(period)) % phases.size();
  return phases[idx];
}

}  // namespace

ScenarioId parse_scenario_id(const std::string& token) {
  if (token == "a") return ScenarioId::A;
  if (token == "b") return ScenarioId::B;
  if (token == "c") return ScenarioId::C;
  if (token == "custom") return ScenarioId::Custom;
  throw std::invalid_argument("unknown scenario '" + token + "' (expected a, b, c or custom)");
}

std::string scenario_token(ScenarioId id) {
  switch (id) {
    case ScenarioId::A: return "a";
    case ScenarioId::B: return "b";
    case ScenarioId::C: return "c";
    case ScenarioId::Custom: return "custom";
  }
  throw std::logic_error("scenario_token: unhandled id");
}

ScenarioConfig ScenarioConfig::preset(ScenarioId id, int horizon, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.id = id;
  cfg.horizon = horizon;
  cfg.period = 50;
  cfg.seed = seed;
  switch (id) {
    case ScenarioId::A:
      cfg.alpha_phases = {vec2(1.0, 1.0)};
      cfg.w_phases = {vec2(1.0, 1.0)};
      break;
    case ScenarioId::B:
      cfg.alpha_phases = {vec2(1.0, 1.0), vec2(-0.5, -0.5)};
      cfg.w_phases = {vec2(1.0, 1.0)};
      break;
    case ScenarioId::C:
      cfg.alpha_phases = {vec2(0.1, 0.1), vec2(-0.5, -0.5)};
      cfg.w_phases = {vec2(0.1, 0.1)};
      break;
    case ScenarioId::Custom:
      // Starts from the constant adversary; callers override the phases.
      cfg.alpha_phases = {vec2(1.0, 1.0)};
      cfg.w_phases = {vec2(1.0, 1.0)};
      break;
  }
  return cfg;
}

void ScenarioConfig::validate() const {
  if (horizon < 0) throw std::invalid_argument("scenario: horizon must be >= 0");
  if (period < 1) throw std::invalid_argument("scenario: period must be >= 1");
  if (alpha_phases.empty() || w_phases.empty())
    throw std::invalid_argument("scenario: at least one alpha phase and one w phase required");
  const Eigen::Index n = alpha_phases[0].size();
  if (n < 1) throw std::invalid_argument("scenario: empty alpha phase vector");
  for (const auto& v : alpha_phases)
    if (v.size() != n) throw std::invalid_argument("scenario: alpha phases must share a dimension");
  for (const auto& v : w_phases)
    if (v.size() != n) throw std::invalid_argument("scenario: w phases must match the state dimension");
  for (const auto& v : beta_phases)
    if (v.size() != n) throw std::invalid_argument("scenario: beta phases must match the action dimension");
}

int ScenarioConfig::dx() const { return static_cast<int>(alpha_phases.at(0).size()); }

// The benchmark plant is square (B = I), so actions live in state dimension.
int ScenarioConfig::du() const { return dx(); }

double ScenarioConfig::alpha_bound() const { return max_norm(alpha_phases); }
double ScenarioConfig::beta_bound() const { return max_norm(beta_phases); }
double ScenarioConfig::w_bound() const { return max_norm(w_phases); }

Trace scenario_trace(const ScenarioConfig& config) {
  config.validate();
  Trace trace;
  trace.costs.reserve(static_cast<size_t>(config.horizon));
  trace.w.reserve(static_cast<size_t>(config.horizon));
  const Eigen::VectorXd zero_beta = Eigen::VectorXd::Zero(config.du());
  for (int t = 1; t <= config.horizon; ++t) {
    LinearCost c;
    c.slot = t;
    c.alpha = phase_at(config.alpha_phases, t, config.period);
    c.beta = config.beta_phases.empty() ? zero_beta
                                        : phase_at(config.beta_phases, t, config.period);
    trace.costs.push_back(std::move(c));
    trace.w.push_back(phase_at(config.w_phases, t, config.period));
  }
  return trace;
}

LtiSystem scenario_system(const ScenarioConfig& config) {
  config.validate();
  const int n = config.dx();
  LtiSystem sys;
  sys.A = 0.9 * Eigen::MatrixXd::Identity(n, n);
  sys.B = Eigen::MatrixXd::Identity(n, n);
  sys.delta = 0.1;
  sys.kappa_b = std::sqrt(static_cast<double>(n));
  sys.w_max = config.w_bound();
  sys.validate();
  return sys;
}

}  // namespace optcon
