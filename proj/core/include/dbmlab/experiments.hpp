#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dbmlab {
namespace experiments {

// One archived JSON document describes one experiment: the kind plus flat
// parameters.  Unknown keys are rejected so stale configs fail loudly.
struct ExperimentConfig {
  std::string kind;
  nlohmann::json params;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct InvariantCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReplicaOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string note;  // empty, "window_violation", or an error message
};

struct RunReport {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<ReplicaOutcome> replicas;
  nlohmann::json aggregates;
  std::vector<InvariantCheck> invariants;
  double wall_time_s = 0.0;

  bool all_invariants_pass() const;
  bool any_replica_failed() const;
  nlohmann::json to_json() const;
};

// Executes the experiment, writing CSV artifacts, config.json and report.json
// under out_dir.  seed_override replaces the config's base seed.  Returns the
// report; CLI exit status is 0 iff all invariant checks pass, 1 on replica
// runtime failure, 2 on invalid config (thrown as std::invalid_argument
// before any compute).
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         int jobs = 1, std::optional<std::uint64_t> seed_override = {});

std::string config_hash(const ExperimentConfig& config);

const std::vector<std::string>& known_kinds();

}  // namespace experiments
}  // namespace dbmlab
