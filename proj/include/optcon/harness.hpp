#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "optcon/baselines.hpp"
#include "optcon/oracle.hpp"
#include "optcon/scenario.hpp"

namespace optcon {

enum class ControllerKind { OptFtrl, Gpc, Optimal };

ControllerKind parse_controller_kind(const std::string& token);
std::string controller_token(ControllerKind kind);

struct OracleSpec {
  OracleKind kind = OracleKind::Perfect;
  double rho = 0.9;  // only meaningful for bernoulli
};

// Everything one experiment needs.  Flag and file parsing both funnel into
// apply_config_entry so the CLI and the config file cannot drift apart.
struct RunConfig {
  ScenarioConfig scenario = ScenarioConfig::preset(ScenarioId::A, 1000, 1);
  OracleSpec oracle;
  std::vector<ControllerKind> controllers = {ControllerKind::OptFtrl, ControllerKind::Gpc,
                                             ControllerKind::Optimal};
  int p = 10;
  int d = 10;          // ignored when d_auto
  bool d_auto = false; // derive d from the per-slot truncation budget epsilon
  double kappa_m = 1.0;
  double epsilon = 1.0;
  int replications = 5;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool plot = false;
  double g_max_override = 0.0;  // > 0 pins the GPC gradient scale

  int effective_d(const LtiSystem& sys) const;
  double effective_g_max(const LtiSystem& sys) const;
  void validate() const;
};

// One row of the per-slot report.
struct SlotRecord {
  int t = 0;
  double cost_learner = 0.0;
  double cost_benchmark = 0.0;
  double regret = 0.0;      // R_t, prefix sum of the cost gap
  double avg_regret = 0.0;  // R_t / t
  double lambda = 0.0;      // regularizer strength the slot's policy was chosen with
  double delta = 0.0;       // forecast error graded this slot (hint used at t-d)
  double m_norm = 0.0;      // ||M_t||_F
  bool oracle_hit = false;  // freshest forecast issued this slot was exact
};

// One controller rollout on one seed.
struct RolloutResult {
  std::string label;
  ControllerKind kind = ControllerKind::OptFtrl;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<SlotRecord> records;
  std::vector<double> error_sums;  // per-slot sum of per-term forecast errors
  double total_cost = 0.0;
  double total_reward = 0.0;  // negated total cost
  double final_regret = 0.0;
  double max_error_sum = 0.0;
  double error_ceiling = 0.0;  // analytic per-slot ceiling for this run
};

struct ControllerSummary {
  std::string label;
  ControllerKind kind = ControllerKind::OptFtrl;
  std::vector<RolloutResult> runs;  // one per replication
  double median_reward = 0.0;
  double median_final_regret = 0.0;
  bool any_failed = false;
};

struct RegretReport {
  RunConfig config;
  LtiSystem system;
  int d = 0;                      // the delay actually used
  double truncation_bound = 0.0;  // (z / delta)(1 - delta)^d
  BenchmarkPolicy benchmark;
  std::vector<double> benchmark_costs;
  std::vector<ControllerSummary> controllers;
  int failed_runs = 0;
};

double median(std::vector<double> values);

// Cumulative cost gap R_t and its average R_t / t.
std::vector<double> policy_regret(const std::vector<double>& learner,
                                  const std::vector<double>& benchmark);
std::vector<double> average_regret(const std::vector<double>& regret);

// Analytic per-slot ceiling on the summed forecast-gradient errors behind
// one hint: 2 beta p w + 2 (1 + delta) alpha kappa_b p w / delta^2, with the
// price bounds widened to cover whatever the oracle may emit.
double forecast_error_ceiling(const LtiSystem& sys, const ScenarioConfig& scenario,
                              const OracleSpec& oracle, int p);

// Rolls every configured controller over the identical adversary trace, one
// rollout per replication (seeds seed, seed+1, ...).  The benchmark policy is
// computed once per trace.  A controller failure marks its runs failed and
// the remaining controllers still execute.
RegretReport run_experiment(const RunConfig& config);

// ---- configuration plumbing ----

// `key = value` lines; '#' starts a comment; blank lines ignored.  Entries
// come back in file order: applying a `scenario` preset resets the adversary
// fields, so later lines must be able to override earlier ones predictably.
std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path);

// Applies one key/value pair onto the config; unknown keys or unparsable
// values are configuration errors.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// The effective configuration as config-file text (round-trips through
// apply_config_entry).
std::string echo_config(const RunConfig& config);

// ---- report emission (report.cpp) ----

std::string slot_csv_header();
std::string slot_csv(const RolloutResult& run);
std::vector<SlotRecord> parse_slot_csv(const std::string& text);

std::string summary_table(const RegretReport& report);
std::string regret_plot_svg(const RegretReport& report);

// Writes slots_<controller>_seed<k>.csv per run, summary.txt, and (when
// config.plot) avg_regret.svg into dir.  Creates dir if needed.
void emit_report(const RegretReport& report, const std::string& dir);

}  // namespace optcon
