#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "optcon/costs.hpp"
#include "optcon/lti_system.hpp"

namespace optcon {

// Named adversary presets (a)/(b)/(c) plus a free-form variant whose phase
// vectors come from configuration.
enum class ScenarioId { A, B, C, Custom };

ScenarioId parse_scenario_id(const std::string& token);
std::string scenario_token(ScenarioId id);

// A scenario is a deterministic periodic adversary: slot t draws its state
// price, action price and disturbance from phase ((t-1) / period) mod n,
// where n is the number of phases declared for that quantity.
struct ScenarioConfig {
  ScenarioId id = ScenarioId::A;
  int horizon = 1000;
  int period = 50;
  std::vector<Eigen::VectorXd> alpha_phases;
  std::vector<Eigen::VectorXd> beta_phases;  // empty means free actions (beta = 0)
  std::vector<Eigen::VectorXd> w_phases;
  std::uint64_t seed = 1;  // consumed by forecast oracles, not by the trace

  static ScenarioConfig preset(ScenarioId id, int horizon, std::uint64_t seed);

  void validate() const;
  int dx() const;
  int du() const;

  // Tight bounds over the declared phases; forecasters and tuning use these.
  double alpha_bound() const;
  double beta_bound() const;
  double w_bound() const;
};

// Materialize the full (cost, disturbance) plan for slots 1..horizon.
Trace scenario_trace(const ScenarioConfig& config);

// The benchmark plant the named scenarios run on: A = 0.9 I, B = I on the
// scenario's state dimension, so delta = 0.1 and kappa_b = ||I||_F = sqrt(dx).
LtiSystem scenario_system(const ScenarioConfig& config);

}  // namespace optcon
