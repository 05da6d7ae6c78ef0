#include "optcon/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "optcon/optftrl.hpp"

namespace optcon {

ControllerKind parse_controller_kind(const std::string& token) {
  if (token == "optftrl") return ControllerKind::OptFtrl;
  if (token == "gpc") return ControllerKind::Gpc;
  if (token == "optimal") return ControllerKind::Optimal;
  throw std::invalid_argument("unknown controller '" + token +
                              "' (expected optftrl, gpc or optimal)");
}

std::string controller_token(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::OptFtrl: return "optftrl";
    case ControllerKind::Gpc: return "gpc";
    case ControllerKind::Optimal: return "optimal";
  }
  throw std::logic_error("controller_token: unhandled kind");
}

int RunConfig::effective_d(const LtiSystem& sys) const {
  if (!d_auto) return d;
  return compute_memory_d(sys, kappa_m, p, std::max(scenario.horizon, 1), epsilon);
}

double RunConfig::effective_g_max(const LtiSystem& sys) const {
  if (g_max_override > 0.0) return g_max_override;
  // The named scenarios tune against the historical gradient-scale constant;
  // free-form runs derive the scale from their own declared bounds.
  if (scenario.id != ScenarioId::Custom) return 300.0;
  double sum = 0.0;
  const int dd = effective_d(sys);
  for (int i = 0; i <= dd; ++i)
    sum += gradient_bound(i, sys, scenario.alpha_bound(), scenario.beta_bound(), p);
  return sum > 0.0 ? sum : 1.0;
}

void RunConfig::validate() const {
  scenario.validate();
  if (p < 1) throw std::invalid_argument("config: p must be >= 1");
  if (!d_auto && d < 0) throw std::invalid_argument("config: d must be >= 0 or auto");
  if (!(kappa_m > 0.0)) throw std::invalid_argument("config: kappa_m must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (controllers.empty()) throw std::invalid_argument("config: no controllers selected");
  if (oracle.kind == OracleKind::Bernoulli && !(oracle.rho >= 0.0 && oracle.rho <= 1.0))
    throw std::invalid_argument("config: rho must lie in [0, 1]");
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> policy_regret(const std::vector<double>& learner,
                                  const std::vector<double>& benchmark) {
  if (learner.size() != benchmark.size())
    throw std::invalid_argument("policy_regret: cost series lengths differ");
  std::vector<double> r(learner.size());
  double acc = 0.0;
  for (size_t i = 0; i < learner.size(); ++i) {
    acc += learner[i] - benchmark[i];
    r[i] = acc;
  }
  return r;
}

std::vector<double> average_regret(const std::vector<double>& regret) {
  std::vector<double> avg(regret.size());
  for (size_t i = 0; i < regret.size(); ++i) avg[i] = regret[i] / static_cast<double>(i + 1);
  return avg;
}

double forecast_error_ceiling(const LtiSystem& sys, const ScenarioConfig& scenario,
                              const OracleSpec& oracle, int p) {
  // Price bounds must cover both the adversary and whatever the forecaster
  // may emit (bernoulli misses are componentwise uniform on [-1, 1]).
  double alpha = scenario.alpha_bound();
  double beta = scenario.beta_bound();
  if (oracle.kind == OracleKind::Bernoulli) {
    alpha = std::max(alpha, std::sqrt(static_cast<double>(scenario.dx())));
    if (beta > 0.0) beta = std::max(beta, std::sqrt(static_cast<double>(scenario.du())));
  }
  const double w = sys.w_max;
  const double delta = sys.delta;
  return 2.0 * beta * p * w +
         2.0 * (1.0 + delta) * alpha * sys.kappa_b * p * w / (delta * delta);
}

namespace {

std::string optftrl_label(const OracleSpec& oracle) {
  switch (oracle.kind) {
    case OracleKind::Perfect: return "OptFTRL-C(perfect)";
    case OracleKind::Zero: return "OptFTRL-C(zero)";
    case OracleKind::Bernoulli: {
      std::ostringstream os;
      os << "OptFTRL-C(rho=" << oracle.rho << ")";
      return os.str();
    }
  }
  throw std::logic_error("optftrl_label: unhandled oracle kind");
}

std::string controller_label(ControllerKind kind, const OracleSpec& oracle) {
  switch (kind) {
    case ControllerKind::OptFtrl: return optftrl_label(oracle);
    case ControllerKind::Gpc: return "GPC";
    case ControllerKind::Optimal: return "Optimal";
  }
  throw std::logic_error("controller_label: unhandled kind");
}

void push_record(RolloutResult& res, int t, double cost_learner, double cost_benchmark,
                 double lambda, double delta, double m_norm, bool hit) {
  SlotRecord rec;
  rec.t = t;
  rec.cost_learner = cost_learner;
  rec.cost_benchmark = cost_benchmark;
  const double prev = res.records.empty() ? 0.0 : res.records.back().regret;
  rec.regret = prev + (cost_learner - cost_benchmark);
  rec.avg_regret = rec.regret / static_cast<double>(t);
  rec.lambda = lambda;
  rec.delta = delta;
  rec.m_norm = m_norm;
  rec.oracle_hit = hit;
  res.records.push_back(rec);
  res.total_cost += cost_learner;
}

void check_feasible(double norm, double kappa_m) {
  if (norm > kappa_m * (1.0 + 1e-9) + 1e-12)
    throw std::logic_error("rollout: policy left the feasible ball");
}

RolloutResult run_one(ControllerKind kind, const RunConfig& config, const LtiSystem& sys,
                      const Trace& trace, const BenchmarkPolicy& bench,
                      const std::vector<double>& bench_costs, int d, std::uint64_t seed) {
  RolloutResult res;
  res.kind = kind;
  res.label = controller_label(kind, config.oracle);
  res.seed = seed;
  const int T = trace.horizon();
  try {
    switch (kind) {
      case ControllerKind::OptFtrl: {
        res.error_ceiling = forecast_error_ceiling(sys, config.scenario, config.oracle,
                                                   config.p);
        PredictionOracle oracle(config.oracle.kind, config.oracle.rho, seed, d);
        OptFtrlController ctrl(sys, config.p, d, config.kappa_m, T);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dx());
        double lambda_in_effect = 0.0;  // strength behind the policy being played
        for (int t = 1; t <= T; ++t) {
          const Eigen::VectorXd u = ctrl.action();
          const double m_norm = ctrl.policy().norm();
          const double cl = eval_cost(trace.costs[static_cast<size_t>(t - 1)], x, u);
          x = step(sys, x, u, trace.w[static_cast<size_t>(t - 1)]);
          const PredictionBatch batch = oracle.predict(t + 1, trace);
          const SlotUpdate up =
              ctrl.observe(trace.costs[static_cast<size_t>(t - 1)],
                           trace.w[static_cast<size_t>(t - 1)], batch);
          check_feasible(up.policy_norm, config.kappa_m);
          push_record(res, t, cl, bench_costs[static_cast<size_t>(t - 1)], lambda_in_effect,
                      up.delta, m_norm, up.oracle_hit);
          res.error_sums.push_back(up.error_sum);
          res.max_error_sum = std::max(res.max_error_sum, up.error_sum);
          lambda_in_effect = up.lambda_next;
        }
        break;
      }
      case ControllerKind::Gpc: {
        GpcController ctrl(sys, config.p, d, config.kappa_m,
                           config.effective_g_max(sys), std::max(T, 1));
        Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.dx());
        for (int t = 1; t <= T; ++t) {
          const Eigen::VectorXd u = ctrl.action();
          const double m_norm = ctrl.policy().norm();
          const double cl = eval_cost(trace.costs[static_cast<size_t>(t - 1)], x, u);
          x = step(sys, x, u, trace.w[static_cast<size_t>(t - 1)]);
          ctrl.observe(trace.costs[static_cast<size_t>(t - 1)],
                       trace.w[static_cast<size_t>(t - 1)]);
          check_feasible(ctrl.policy().norm(), config.kappa_m);
          push_record(res, t, cl, bench_costs[static_cast<size_t>(t - 1)], 0.0, 0.0, m_norm,
                      false);
        }
        break;
      }
      case ControllerKind::Optimal: {
        // Replays the hindsight-optimal static policy; its trajectory is the
        // benchmark trajectory, so its regret stays exactly zero.
        const double m_norm = bench.M_star.norm();
        for (int t = 1; t <= T; ++t) {
          const double c = bench_costs[static_cast<size_t>(t - 1)];
          push_record(res, t, c, c, 0.0, 0.0, m_norm, false);
        }
        break;
      }
    }
    res.total_reward = -res.total_cost;
    res.final_regret = res.records.empty() ? 0.0 : res.records.back().regret;
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

}  // namespace

RegretReport run_experiment(const RunConfig& config) {
  config.validate();
  RegretReport report;
  report.config = config;
  report.system = scenario_system(config.scenario);
  const Trace trace = scenario_trace(config.scenario);
  const int d = config.effective_d(report.system);
  report.d = d;
  const double z = memory_z(report.system, config.kappa_m, config.p);
  report.truncation_bound =
      (z / report.system.delta) * std::pow(1.0 - report.system.delta, d);
  report.benchmark = optimal_static_policy(report.system, trace, config.kappa_m, config.p);
  report.benchmark_costs =
      rollout_static_costs(report.system, report.benchmark.M_star, trace, config.p);

  for (ControllerKind kind : config.controllers) {
    ControllerSummary summary;
    summary.kind = kind;
    summary.label = controller_label(kind, config.oracle);
    std::vector<double> rewards, regrets;
    for (int rep = 0; rep < config.replications; ++rep) {
      RolloutResult run = run_one(kind, config, report.system, trace, report.benchmark,
                                  report.benchmark_costs, d,
                                  config.seed + static_cast<std::uint64_t>(rep));
      if (run.failed) {
        summary.any_failed = true;
        ++report.failed_runs;
      } else {
        rewards.push_back(run.total_reward);
        regrets.push_back(run.final_regret);
      }
      summary.runs.push_back(std::move(run));
    }
    summary.median_reward = median(rewards);
    summary.median_final_regret = median(regrets);
    report.controllers.push_back(std::move(summary));
  }
  return report;
}

// ---- configuration plumbing ----

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t idx = 0;
    const double v = std::stod(value, &idx);
    if (trim(value.substr(idx)).empty()) return v;
  } catch (...) {
  }
  throw std::invalid_argument("config: value '" + value + "' for key '" + key +
                              "' is not a number");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t idx = 0;
    const long long v = std::stoll(value, &idx);
    if (trim(value.substr(idx)).empty()) return v;
  } catch (...) {
  }
  throw std::invalid_argument("config: value '" + value + "' for key '" + key +
                              "' is not an integer");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config: value '" + value + "' for key '" + key +
                              "' is not a boolean");
}

Eigen::VectorXd parse_vector(const std::string& key, const std::string& value) {
  const std::vector<std::string> parts = split(value, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_double(key, trim(parts[i]));
  return v;
}

void set_phase(std::vector<Eigen::VectorXd>& phases, size_t index, Eigen::VectorXd v) {
  if (phases.size() <= index) phases.resize(index + 1, Eigen::VectorXd::Zero(v.size()));
  phases[index] = std::move(v);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& raw_key,
                        const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.empty()) throw std::invalid_argument("config: empty key");

  if (key == "scenario") {
    const ScenarioId id = parse_scenario_id(value);
    const int horizon = config.scenario.horizon;
    const std::uint64_t seed = config.scenario.seed;
    config.scenario = ScenarioConfig::preset(id, horizon, seed);
  } else if (key == "T" || key == "horizon") {
    const long long v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("config: T must be >= 0");
    config.scenario.horizon = static_cast<int>(v);
  } else if (key == "period") {
    const long long v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: period must be >= 1");
    config.scenario.period = static_cast<int>(v);
  } else if (key == "oracle") {
    config.oracle.kind = parse_oracle_kind(value);
  } else if (key == "rho") {
    config.oracle.rho = parse_double(key, value);
  } else if (key == "controllers") {
    std::vector<ControllerKind> kinds;
    for (const std::string& part : split(value, ',')) {
      const std::string token = trim(part);
      if (token.empty()) continue;
      const ControllerKind kind = parse_controller_kind(token);
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    }
    if (kinds.empty()) throw std::invalid_argument("config: controllers list is empty");
    config.controllers = std::move(kinds);
  } else if (key == "d") {
    if (value == "auto") {
      config.d_auto = true;
    } else {
      const long long v = parse_int(key, value);
      if (v < 0) throw std::invalid_argument("config: d must be >= 0 or auto");
      config.d_auto = false;
      config.d = static_cast<int>(v);
    }
  } else if (key == "p") {
    const long long v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: p must be >= 1");
    config.p = static_cast<int>(v);
  } else if (key == "kappa_m" || key == "kappa-m") {
    const double v = parse_double(key, value);
    if (!(v > 0.0)) throw std::invalid_argument("config: kappa_m must be positive");
    config.kappa_m = v;
  } else if (key == "epsilon") {
    const double v = parse_double(key, value);
    if (!(v > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
    config.epsilon = v;
  } else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("config: seed must be >= 0");
    config.seed = static_cast<std::uint64_t>(v);
    config.scenario.seed = config.seed;
  } else if (key == "replications") {
    const long long v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: replications must be >= 1");
    config.replications = static_cast<int>(v);
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "plot") {
    config.plot = parse_bool(key, value);
  } else if (key == "gmax") {
    if (value == "auto") {
      config.g_max_override = 0.0;
    } else {
      const double v = parse_double(key, value);
      if (!(v > 0.0)) throw std::invalid_argument("config: gmax must be positive or auto");
      config.g_max_override = v;
    }
  } else if (key == "alpha1" || key == "alpha2") {
    set_phase(config.scenario.alpha_phases, key == "alpha1" ? 0 : 1,
              parse_vector(key, value));
  } else if (key == "beta1" || key == "beta2") {
    set_phase(config.scenario.beta_phases, key == "beta1" ? 0 : 1, parse_vector(key, value));
  } else if (key == "w1" || key == "w2") {
    set_phase(config.scenario.w_phases, key == "w1" ? 0 : 1, parse_vector(key, value));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string key, value;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      const auto ws = line.find_first_of(" \t");
      if (ws == std::string::npos)
        throw std::invalid_argument("config: malformed line '" + line + "' in " + path);
      key = trim(line.substr(0, ws));
      value = trim(line.substr(ws + 1));
    }
    if (key.empty()) throw std::invalid_argument("config: malformed line '" + line + "'");
    entries.emplace_back(key, value);
  }
  return entries;
}

std::string echo_config(const RunConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario = " << scenario_token(config.scenario.id) << "\n";
  os << "T = " << config.scenario.horizon << "\n";
  os << "period = " << config.scenario.period << "\n";
  if (config.scenario.id == ScenarioId::Custom) {
    const auto emit_phases = [&os](const char* name,
                                   const std::vector<Eigen::VectorXd>& phases) {
      for (size_t i = 0; i < phases.size() && i < 2; ++i) {
        os << name << (i + 1) << " = ";
        for (Eigen::Index k = 0; k < phases[i].size(); ++k) {
          if (k) os << ",";
          os << phases[i](k);
        }
        os << "\n";
      }
    };
    emit_phases("alpha", config.scenario.alpha_phases);
    emit_phases("beta", config.scenario.beta_phases);
    emit_phases("w", config.scenario.w_phases);
  }
  os << "oracle = " << oracle_token(config.oracle.kind) << "\n";
  os << "rho = " << config.oracle.rho << "\n";
  os << "controllers = ";
  for (size_t i = 0; i < config.controllers.size(); ++i) {
    if (i) os << ",";
    os << controller_token(config.controllers[i]);
  }
  os << "\n";
  if (config.d_auto)
    os << "d = auto\n";
  else
    os << "d = " << config.d << "\n";
  os << "p = " << config.p << "\n";
  os << "kappa_m = " << config.kappa_m << "\n";
  os << "epsilon = " << config.epsilon << "\n";
  os << "seed = " << config.seed << "\n";
  os << "replications = " << config.replications << "\n";
  if (!config.out_dir.empty()) os << "out = " << config.out_dir << "\n";
  os << "plot = " << (config.plot ? 1 : 0) << "\n";
  if (config.g_max_override > 0.0) os << "gmax = " << config.g_max_override << "\n";
  return os.str();
}

}  // namespace optcon
