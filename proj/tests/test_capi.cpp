#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "optcon.h"
#include "optcon/harness.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("optcon_capi_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Handle {
  optcon_run* run = optcon_run_new();
  ~Handle() { optcon_run_free(run); }
};

void set_ok(optcon_run* run, const char* key, const char* value) {
  REQUIRE(optcon_run_set(run, key, value) == OPTCON_OK);
}

void configure_small(optcon_run* run) {
  set_ok(run, "scenario", "a");
  set_ok(run, "T", "40");
  set_ok(run, "d", "3");
  set_ok(run, "p", "3");
  set_ok(run, "replications", "2");
  set_ok(run, "seed", "7");
  set_ok(run, "oracle", "perfect");
  set_ok(run, "controllers", "optftrl,gpc,optimal");
}

}  // namespace

TEST_CASE("library version and status names are stable strings") {
  CHECK(std::string(optcon_version()) == "0.1.0");
  CHECK(std::string(optcon_status_name(OPTCON_OK)) == "ok");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_ARG)) == "bad argument");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_CONFIG)) == "configuration error");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_STATE)) == "call sequencing error");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_IO)) == "i/o error");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_RUN)) == "rollout failure");
  CHECK(std::string(optcon_status_name(OPTCON_ERR_INTERNAL)) == "internal error");
}

TEST_CASE("null handles are rejected without crashing") {
  optcon_run_free(nullptr);
  CHECK(optcon_run_set(nullptr, "T", "10") == OPTCON_ERR_ARG);
  CHECK(optcon_run_execute(nullptr) == OPTCON_ERR_ARG);
  CHECK(optcon_run_controller_count(nullptr) == 0);
  CHECK(optcon_run_controller_name(nullptr, 0) == nullptr);
  CHECK(optcon_run_failed_count(nullptr) == 0);
  CHECK(optcon_run_summary(nullptr) == nullptr);
  CHECK(std::string(optcon_run_last_error(nullptr)) == "null handle");
  double out = 0.0;
  CHECK(optcon_run_median_reward(nullptr, 0, &out) == OPTCON_ERR_ARG);
}

TEST_CASE("a configured run matches the in-process experiment") {
  Handle h;
  REQUIRE(h.run != nullptr);
  configure_small(h.run);
  REQUIRE(optcon_run_execute(h.run) == OPTCON_OK);
  CHECK(optcon_run_failed_count(h.run) == 0);
  REQUIRE(optcon_run_controller_count(h.run) == 3);
  CHECK(std::string(optcon_run_controller_name(h.run, 0)) == "OptFTRL-C(perfect)");
  CHECK(std::string(optcon_run_controller_name(h.run, 1)) == "GPC");
  CHECK(std::string(optcon_run_controller_name(h.run, 2)) == "Optimal");
  CHECK(optcon_run_controller_name(h.run, 3) == nullptr);
  CHECK(optcon_run_controller_name(h.run, -1) == nullptr);

  optcon::RunConfig config;
  for (auto [k, v] : {std::pair<const char*, const char*>{"scenario", "a"},
                      {"T", "40"},
                      {"d", "3"},
                      {"p", "3"},
                      {"replications", "2"},
                      {"seed", "7"},
                      {"oracle", "perfect"},
                      {"controllers", "optftrl,gpc,optimal"}})
    optcon::apply_config_entry(config, k, v);
  const optcon::RegretReport report = optcon::run_experiment(config);

  for (int i = 0; i < 3; ++i) {
    double reward = 0.0, regret = 0.0;
    REQUIRE(optcon_run_median_reward(h.run, i, &reward) == OPTCON_OK);
    REQUIRE(optcon_run_median_final_regret(h.run, i, &regret) == OPTCON_OK);
    CHECK(reward == report.controllers[static_cast<size_t>(i)].median_reward);
    CHECK(regret == report.controllers[static_cast<size_t>(i)].median_final_regret);
  }

  const char* summary = optcon_run_summary(h.run);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("OptFTRL-C(perfect)") != std::string::npos);

  double out = 0.0;
  CHECK(optcon_run_median_reward(h.run, 99, &out) == OPTCON_ERR_ARG);
  CHECK(optcon_run_median_reward(h.run, 0, nullptr) == OPTCON_ERR_ARG);

  // Touching the configuration invalidates the previous results.
  set_ok(h.run, "T", "20");
  CHECK(optcon_run_controller_count(h.run) == 0);
}

TEST_CASE("configuration errors carry a message and leave the handle usable") {
  Handle h;
  REQUIRE(h.run != nullptr);
  CHECK(optcon_run_set(h.run, "warp", "9") == OPTCON_ERR_CONFIG);
  CHECK(std::string(optcon_run_last_error(h.run)).find("warp") != std::string::npos);
  CHECK(optcon_run_set(h.run, "T", "soon") == OPTCON_ERR_CONFIG);
  CHECK(optcon_run_set(h.run, nullptr, "1") == OPTCON_ERR_ARG);
  CHECK(optcon_run_set(h.run, "T", nullptr) == OPTCON_ERR_ARG);

  // An out-of-range forecast rate only surfaces when the run is validated.
  set_ok(h.run, "oracle", "bernoulli");
  set_ok(h.run, "rho", "2.0");
  set_ok(h.run, "T", "10");
  CHECK(optcon_run_execute(h.run) == OPTCON_ERR_CONFIG);
  CHECK(std::string(optcon_run_last_error(h.run)).find("rho") != std::string::npos);

  set_ok(h.run, "rho", "0.5");
  set_ok(h.run, "d", "2");
  set_ok(h.run, "p", "2");
  set_ok(h.run, "replications", "1");
  CHECK(optcon_run_execute(h.run) == OPTCON_OK);
}

TEST_CASE("results cannot be queried before execute") {
  Handle h;
  REQUIRE(h.run != nullptr);
  double out = 0.0;
  CHECK(optcon_run_median_reward(h.run, 0, &out) == OPTCON_ERR_STATE);
  CHECK(optcon_run_median_final_regret(h.run, 0, &out) == OPTCON_ERR_STATE);
  CHECK(optcon_run_controller_count(h.run) == 0);
  CHECK(optcon_run_summary(h.run) == nullptr);
  CHECK(std::string(optcon_run_last_error(h.run)).find("before execute") !=
        std::string::npos);
  CHECK(optcon_run_write_reports(h.run, "unused") == OPTCON_ERR_STATE);
}

TEST_CASE("config files load through the handle") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "scenario = a\nT = 24\nd = 2\np = 2\nreplications = 1\n"
        << "oracle = zero\ncontrollers = optftrl\n";
  }
  Handle h;
  REQUIRE(h.run != nullptr);
  REQUIRE(optcon_run_load_config(h.run, cfg.string().c_str()) == OPTCON_OK);
  REQUIRE(optcon_run_execute(h.run) == OPTCON_OK);
  const char* summary = optcon_run_summary(h.run);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("T = 24") != std::string::npos);
  CHECK(std::string(summary).find("OptFTRL-C(zero)") != std::string::npos);

  CHECK(optcon_run_load_config(h.run, (tmp.path / "absent.cfg").string().c_str()) ==
        OPTCON_ERR_IO);
  CHECK(optcon_run_load_config(h.run, nullptr) == OPTCON_ERR_ARG);
}

TEST_CASE("reports are written to the requested or configured directory") {
  TempDir tmp;
  Handle h;
  REQUIRE(h.run != nullptr);
  configure_small(h.run);
  set_ok(h.run, "replications", "1");

  // No directory anywhere: a boundary error, not an exception.
  REQUIRE(optcon_run_execute(h.run) == OPTCON_OK);
  CHECK(optcon_run_write_reports(h.run, nullptr) == OPTCON_ERR_ARG);

  const std::string explicit_dir = (tmp.path / "explicit").string();
  CHECK(optcon_run_write_reports(h.run, explicit_dir.c_str()) == OPTCON_OK);
  CHECK(fs::exists(fs::path(explicit_dir) / "summary.txt"));
  CHECK(fs::exists(fs::path(explicit_dir) / "slots_optftrl_seed7.csv"));

  const std::string configured_dir = (tmp.path / "configured").string();
  set_ok(h.run, "out", configured_dir.c_str());
  REQUIRE(optcon_run_execute(h.run) == OPTCON_OK);
  CHECK(optcon_run_write_reports(h.run, nullptr) == OPTCON_OK);
  CHECK(fs::exists(fs::path(configured_dir) / "summary.txt"));
}

TEST_CASE("the built-in verification suites pass in quick mode") {
  int failures = -1;
  CHECK(optcon_self_check(1, &failures) == OPTCON_OK);
  CHECK(failures == 0);
  CHECK(optcon_self_check(1, nullptr) == OPTCON_OK);
}
