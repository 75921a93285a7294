#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dbmlab/experiments.hpp"

using dbmlab::experiments::ExperimentConfig;
using dbmlab::experiments::RunReport;

int main(int argc, char** argv) {
  CLI::App app{"dbm-edge-lab: edge-statistics experiments for interacting particle dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;

  std::string chosen;
  for (const auto& kind : dbmlab::experiments::known_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config's base seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--jobs", jobs, "replica-level worker count");
    sub->callback([&, kind] { chosen = kind; });
  }

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    std::ifstream f(config_path);
    if (!f) throw std::invalid_argument("cannot open config file: " + config_path);
    nlohmann::json doc = nlohmann::json::parse(f);
    cfg = ExperimentConfig::from_json(doc);
    if (cfg.kind.empty()) cfg.kind = chosen;
    if (cfg.kind != chosen)
      throw std::invalid_argument("config kind '" + cfg.kind + "' does not match subcommand '" +
                                  chosen + "'");
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }

  try {
    const RunReport report = dbmlab::experiments::run_experiment(
        cfg, out_dir, jobs, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    for (const auto& inv : report.invariants)
      std::cout << (inv.pass ? "PASS " : "FAIL ") << inv.name
                << (inv.detail.empty() ? "" : "  (" + inv.detail + ")") << "\n";
    std::cout << "report: " << out_dir << "/report.json  (config hash " << report.config_hash
              << ", " << report.wall_time_s << " s)\n";
    if (report.any_replica_failed()) return 1;
    return report.all_invariants_pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 1;
  }
}
