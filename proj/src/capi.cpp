#include "optcon.h"

#include <exception>
#include <iostream>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include "optcon/harness.hpp"
#include "optcon/selfcheck.hpp"

// The opaque handle: configuration, results and the last error message.
struct optcon_run {
  optcon::RunConfig config;
  std::optional<optcon::RegretReport> report;
  std::string last_error;
  std::string summary_cache;
};

namespace {

optcon_status classify(const std::exception& e) {
  if (dynamic_cast<const std::invalid_argument*>(&e)) return OPTCON_ERR_CONFIG;
  if (dynamic_cast<const std::logic_error*>(&e)) return OPTCON_ERR_INTERNAL;
  if (dynamic_cast<const std::runtime_error*>(&e)) return OPTCON_ERR_IO;
  return OPTCON_ERR_INTERNAL;
}

template <typename Fn>
optcon_status guarded(optcon_run* run, Fn&& fn) {
  if (!run) return OPTCON_ERR_ARG;
  run->last_error.clear();
  try {
    return fn();
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return classify(e);
  } catch (...) {
    run->last_error = "unknown error";
    return OPTCON_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* optcon_version(void) { return "0.1.0"; }

const char* optcon_status_name(optcon_status status) {
  switch (status) {
    case OPTCON_OK: return "ok";
    case OPTCON_ERR_ARG: return "bad argument";
    case OPTCON_ERR_CONFIG: return "configuration error";
    case OPTCON_ERR_STATE: return "call sequencing error";
    case OPTCON_ERR_IO: return "i/o error";
    case OPTCON_ERR_RUN: return "rollout failure";
    case OPTCON_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

optcon_run* optcon_run_new(void) {
  try {
    return new optcon_run();
  } catch (...) {
    return nullptr;
  }
}

void optcon_run_free(optcon_run* run) { delete run; }

const char* optcon_run_last_error(const optcon_run* run) {
  return run ? run->last_error.c_str() : "null handle";
}

optcon_status optcon_run_set(optcon_run* run, const char* key, const char* value) {
  return guarded(run, [&]() {
    if (!key || !value) {
      run->last_error = "null key or value";
      return OPTCON_ERR_ARG;
    }
    optcon::apply_config_entry(run->config, key, value);
    run->report.reset();  // configuration changed: previous results are stale
    return OPTCON_OK;
  });
}

optcon_status optcon_run_load_config(optcon_run* run, const char* path) {
  return guarded(run, [&]() {
    if (!path) {
      run->last_error = "null path";
      return OPTCON_ERR_ARG;
    }
    for (const auto& [key, value] : optcon::parse_kv_file(path))
      optcon::apply_config_entry(run->config, key, value);
    run->report.reset();
    return OPTCON_OK;
  });
}

optcon_status optcon_run_execute(optcon_run* run) {
  return guarded(run, [&]() {
    run->report = optcon::run_experiment(run->config);
    if (run->report->failed_runs > 0) {
      run->last_error = std::to_string(run->report->failed_runs) + " rollout(s) failed";
      return OPTCON_ERR_RUN;
    }
    return OPTCON_OK;
  });
}

int optcon_run_controller_count(const optcon_run* run) {
  if (!run || !run->report) return 0;
  return static_cast<int>(run->report->controllers.size());
}

const char* optcon_run_controller_name(const optcon_run* run, int index) {
  if (!run || !run->report) return nullptr;
  if (index < 0 || index >= static_cast<int>(run->report->controllers.size())) return nullptr;
  return run->report->controllers[static_cast<size_t>(index)].label.c_str();
}

optcon_status optcon_run_median_reward(const optcon_run* run, int index, double* out) {
  if (!run || !out) return OPTCON_ERR_ARG;
  if (!run->report) return OPTCON_ERR_STATE;
  if (index < 0 || index >= static_cast<int>(run->report->controllers.size()))
    return OPTCON_ERR_ARG;
  *out = run->report->controllers[static_cast<size_t>(index)].median_reward;
  return OPTCON_OK;
}

optcon_status optcon_run_median_final_regret(const optcon_run* run, int index, double* out) {
  if (!run || !out) return OPTCON_ERR_ARG;
  if (!run->report) return OPTCON_ERR_STATE;
  if (index < 0 || index >= static_cast<int>(run->report->controllers.size()))
    return OPTCON_ERR_ARG;
  *out = run->report->controllers[static_cast<size_t>(index)].median_final_regret;
  return OPTCON_OK;
}

int optcon_run_failed_count(const optcon_run* run) {
  if (!run || !run->report) return 0;
  return run->report->failed_runs;
}

const char* optcon_run_summary(optcon_run* run) {
  if (!run) return nullptr;
  if (!run->report) {
    run->last_error = "summary requested before execute";
    return nullptr;
  }
  try {
    run->summary_cache = optcon::summary_table(*run->report);
    return run->summary_cache.c_str();
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return nullptr;
  }
}

optcon_status optcon_run_write_reports(optcon_run* run, const char* dir) {
  return guarded(run, [&]() {
    if (!run->report) {
      run->last_error = "reports requested before execute";
      return OPTCON_ERR_STATE;
    }
    const std::string target = dir ? dir : run->config.out_dir;
    if (target.empty()) {
      run->last_error = "no output directory configured";
      return OPTCON_ERR_ARG;
    }
    optcon::emit_report(*run->report, target);
    return OPTCON_OK;
  });
}

optcon_status optcon_self_check(int quick, int* failures) {
  try {
    const int failed = optcon::run_self_check(quick != 0, std::cout);
    if (failures) *failures = failed;
    return OPTCON_OK;
  } catch (const std::exception&) {
    if (failures) *failures = -1;
    return OPTCON_ERR_INTERNAL;
  }
}

}  // extern "C"
