#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "arc/baselines.hpp"
#include "arc/envs.hpp"

namespace arc {

struct PolicySpec {
  std::string label;
  PolicyKind kind;
};

struct ExperimentConfig {
  EnvironmentSpec env;
  std::vector<PolicySpec> policies;
  int horizon = 500;
  int replications = 200;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int checkpoint_interval = 0;  // belief snapshots every N steps; 0 = off
  int workers = 1;

  void validate() const;
};

/// Cumulative regret path of one (policy, replication) episode.
struct RegretTrace {
  std::string label;
  int replication = 0;
  std::uint64_t theta_hash = 0;
  std::vector<double> cumulative;
  bool failed = false;
  std::string error;
};

/// Per-policy quantile curves over replications; column order follows the
/// config's policy order.
struct SummaryTables {
  std::vector<std::string> labels;
  int horizon = 0;
  int replications = 0;
  Matrix mean, median, q75, q90;  // horizon x policies
  int failed_episodes = 0;
  int total_episodes = 0;
  std::vector<std::string> failures;

  bool failure_threshold_exceeded() const {
    return total_episodes > 0 &&
           failed_episodes * 100 > total_episodes;  // > 1%
  }
};

/// Run one episode: belief starts at the env prior; each step the policy
/// decides, the environment emits an observation, the belief updates and
/// instant regret accrues. Decision and observation randomness come from
/// separate deterministic streams.
RegretTrace run_episode(const ExperimentConfig& config, const PolicySpec& policy,
                        int policy_id, const Vector& theta, int replication);

/// Paired experiment: every policy in replication r faces the same theta and
/// the same observation stream seed. Failed episodes are excluded from the
/// quantiles and reported.
SummaryTables run_experiment(const ExperimentConfig& config);

/// One CSV per statistic with columns (t, policy_1, ..., policy_n).
void emit_plot_data(const SummaryTables& summary, const std::string& dir);

/// Audit log of the per-replication ground-truth draws (replication, theta...).
void emit_theta_log(const ExperimentConfig& config, const std::string& dir);

/// JSON manifest: config echo, content hash of the emitted CSVs, failure
/// counts, wall clock.
void write_manifest(const ExperimentConfig& config, const SummaryTables& summary,
                    const std::string& dir, double wall_seconds);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PolicySpec& p);
PolicySpec policy_spec_from_json(const nlohmann::json& j);

}  // namespace arc
