// Command-line front end for the optcon shared library.  Talks to the
// library exclusively through the C interface in optcon.h.

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "optcon.h"

namespace {

struct RunDeleter {
  void operator()(optcon_run* run) const { optcon_run_free(run); }
};
using RunHandle = std::unique_ptr<optcon_run, RunDeleter>;

int fail(const optcon_run* run, const char* what, optcon_status status) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, optcon_run_last_error(run),
               optcon_status_name(status));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online control of a linear plant under forecast hints"};
  app.require_subcommand(1);

  // ---- run ----
  CLI::App* run_cmd = app.add_subcommand("run", "roll the configured controllers and report");
  std::string scenario = "a", oracle = "perfect", d_arg = "10", controllers = "optftrl,gpc,optimal";
  std::string out_dir, config_path;
  int horizon = 1000, p = 10, replications = 5;
  long long seed = 1;
  double rho = 0.9, kappa_m = 1.0, epsilon = 1.0, gmax = 0.0;
  bool plot = false;
  run_cmd->add_option("--scenario", scenario, "adversary preset: a, b, c or custom");
  run_cmd->add_option("--T", horizon, "number of slots");
  run_cmd->add_option("--rho", rho, "per-slot truth probability of the bernoulli oracle");
  run_cmd->add_option("--oracle", oracle, "forecaster: perfect, zero or bernoulli");
  run_cmd->add_option("--controllers", controllers, "comma list of optftrl, gpc, optimal");
  run_cmd->add_option("--d", d_arg, "decision delay/truncation depth, or 'auto'");
  run_cmd->add_option("--p", p, "disturbance memory length");
  run_cmd->add_option("--kappa-m", kappa_m, "policy ball radius");
  run_cmd->add_option("--epsilon", epsilon, "total truncation budget used when d = auto");
  run_cmd->add_option("--seed", seed, "base seed; replication k uses seed + k");
  run_cmd->add_option("--out", out_dir, "directory for CSVs, summary and plot");
  run_cmd->add_option("--replications", replications, "independent rollouts per controller");
  run_cmd->add_option("--gmax", gmax, "override the GPC gradient scale (0 = auto)");
  run_cmd->add_flag("--plot", plot, "also write avg_regret.svg");
  run_cmd->add_option("--config", config_path,
                      "key/value file applied after the flags (file wins)");

  // ---- self-check ----
  CLI::App* check_cmd =
      app.add_subcommand("self-check", "run the built-in numerical verification suites");
  bool quick = false;
  check_cmd->add_flag("--quick", quick, "smaller instance counts");

  CLI11_PARSE(app, argc, argv);

  if (check_cmd->parsed()) {
    int failures = 0;
    if (optcon_self_check(quick ? 1 : 0, &failures) != OPTCON_OK) {
      std::fprintf(stderr, "error: self-check did not run\n");
      return 1;
    }
    return failures == 0 ? 0 : 1;
  }

  RunHandle run(optcon_run_new());
  if (!run) {
    std::fprintf(stderr, "error: could not allocate run handle\n");
    return 1;
  }

  std::vector<std::pair<std::string, std::string>> options = {
      {"scenario", scenario},
      {"T", std::to_string(horizon)},
      {"oracle", oracle},
      {"rho", std::to_string(rho)},
      {"controllers", controllers},
      {"d", d_arg},
      {"p", std::to_string(p)},
      {"kappa_m", std::to_string(kappa_m)},
      {"epsilon", std::to_string(epsilon)},
      {"seed", std::to_string(seed)},
      {"replications", std::to_string(replications)},
  };
  if (!out_dir.empty()) options.emplace_back("out", out_dir);
  if (plot) options.emplace_back("plot", "1");
  if (gmax > 0.0) options.emplace_back("gmax", std::to_string(gmax));

  for (const auto& [key, value] : options) {
    const optcon_status st = optcon_run_set(run.get(), key.c_str(), value.c_str());
    if (st != OPTCON_OK) return fail(run.get(), key.c_str(), st);
  }
  if (!config_path.empty()) {
    const optcon_status st = optcon_run_load_config(run.get(), config_path.c_str());
    if (st != OPTCON_OK) return fail(run.get(), "config file", st);
  }

  const optcon_status st = optcon_run_execute(run.get());
  if (st != OPTCON_OK && st != OPTCON_ERR_RUN) return fail(run.get(), "execute", st);

  if (const char* summary = optcon_run_summary(run.get())) std::fputs(summary, stdout);

  // Reports go wherever "out" ended up pointing (flag or config file); when
  // no directory was configured there is simply nothing to write.
  const optcon_status wst = optcon_run_write_reports(run.get(), nullptr);
  if (wst == OPTCON_OK)
    std::printf("reports written\n");
  else if (wst != OPTCON_ERR_ARG)
    return fail(run.get(), "write reports", wst);

  const int failed = optcon_run_failed_count(run.get());
  if (failed > 0) {
    std::fprintf(stderr, "error: %d rollout(s) failed\n", failed);
    return 1;
  }
  return 0;
}
