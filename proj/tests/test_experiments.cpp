#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbmlab/experiments.hpp"

using namespace dbmlab::experiments;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dbmlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing: kind extraction and strict keys") {
  const auto cfg = ExperimentConfig::from_json(
      {{"kind", "sample-gbe"}, {"N", 4}, {"beta", 2.0}, {"seeds", 2}});
  CHECK(cfg.kind == "sample-gbe");
  CHECK(cfg.params.at("N") == 4);

  ExperimentConfig bad;
  bad.kind = "sample-gbe";
  bad.params = {{"N", 4}, {"beta", 2.0}, {"seeds", 2}, {"bogus_knob", 1}};
  CHECK_THROWS_AS(run_experiment(bad, fresh_dir("bad"), 1), std::invalid_argument);

  ExperimentConfig missing;
  missing.kind = "sample-gbe";
  missing.params = {{"beta", 2.0}};
  CHECK_THROWS_AS(run_experiment(missing, fresh_dir("missing"), 1), std::invalid_argument);

  ExperimentConfig unknown;
  unknown.kind = "not-a-kind";
  unknown.params = {};
  CHECK_THROWS_AS(run_experiment(unknown, fresh_dir("unknown"), 1), std::invalid_argument);
}

TEST_CASE("sample-gbe: N=1 variance matches the one-particle Gaussian") {
  ExperimentConfig cfg;
  cfg.kind = "sample-gbe";
  cfg.params = {{"N", 1}, {"beta", 2.0}, {"seeds", 8000}, {"store_particles", false}};
  const auto dir = fresh_dir("gbe_n1");
  const auto rep = run_experiment(cfg, dir, 2);
  CHECK(rep.all_invariants_pass());
  const double var = rep.aggregates.at("mu1_variance").get<double>();
  CHECK(var == doctest::Approx(1.0).epsilon(0.06));
  CHECK(fs::exists(dir / "edge_stats.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "config.json"));
}

TEST_CASE("byte-identical reruns for identical config and seeds") {
  ExperimentConfig cfg;
  cfg.kind = "run-dbm";
  cfg.params = {{"N", 12},    {"beta", 2.0},        {"T", 0.05},
                {"dt_base", 1e-3}, {"decimation", 10}, {"seeds", 2},
                {"store_trajectories", true}};
  const auto d1 = fresh_dir("rerun_a");
  const auto d2 = fresh_dir("rerun_b");
  const auto r1 = run_experiment(cfg, d1, 2);
  const auto r2 = run_experiment(cfg, d2, 1);  // different worker count, same bytes
  CHECK(r1.config_hash == r2.config_hash);
  for (const auto* f : {"traj_1.csv", "traj_2.csv", "endpoints.csv"}) {
    CHECK(slurp(d1 / f) == slurp(d2 / f));
    CHECK(!slurp(d1 / f).empty());
  }
}

TEST_CASE("run-coupled: equal sizes give sup_diff exactly zero") {
  ExperimentConfig cfg;
  cfg.kind = "run-coupled";
  cfg.params = {{"N_list", {64, 64}}, {"beta", 2.0}, {"T", 0.1},
                {"T_burn", 0.1},      {"dt_base", 1e-3}, {"seeds", 2}};
  const auto rep = run_experiment(cfg, fresh_dir("coupled_eq"), 2);
  CHECK(rep.all_invariants_pass());
  for (const auto& entry : rep.aggregates.at("pair_medians"))
    CHECK(entry.at("median_sup_diff").get<double>() == 0.0);
}

TEST_CASE("analyze-holder on the smooth synthetic path") {
  ExperimentConfig cfg;
  cfg.kind = "analyze-holder";
  cfg.params = {{"mode", "smooth"}, {"dyadic_depth", 12}, {"seeds", 1}};
  const auto rep = run_experiment(cfg, fresh_dir("holder_smooth"), 1);
  CHECK(rep.aggregates.at("median_exponent").get<double>() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("sao-sample experiment writes samples and aggregates") {
  ExperimentConfig cfg;
  cfg.kind = "sao-sample";
  cfg.params = {{"beta", "inf"}, {"seeds", 1}, {"L", 15.0}, {"h", 0.01}};
  const auto dir = fresh_dir("sao");
  const auto rep = run_experiment(cfg, dir, 1);
  CHECK(rep.all_invariants_pass());
  CHECK(rep.aggregates.at("mean").get<double>() ==
        doctest::Approx(-2.3381074).epsilon(1e-3));
}

TEST_CASE("seed override changes outputs deterministically") {
  ExperimentConfig cfg;
  cfg.kind = "sample-gbe";
  cfg.params = {{"N", 2}, {"beta", 2.0}, {"seeds", 1}, {"store_particles", false}};
  const auto d1 = fresh_dir("seed_a");
  const auto d2 = fresh_dir("seed_b");
  const auto d3 = fresh_dir("seed_c");
  run_experiment(cfg, d1, 1, 100);
  run_experiment(cfg, d2, 1, 100);
  run_experiment(cfg, d3, 1, 101);
  CHECK(slurp(d1 / "edge_stats.csv") == slurp(d2 / "edge_stats.csv"));
  CHECK(slurp(d1 / "edge_stats.csv") != slurp(d3 / "edge_stats.csv"));
}
