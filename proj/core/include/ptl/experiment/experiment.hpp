#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ptl/dynamics/checkpoint.hpp"
#include "ptl/experiment/config.hpp"
#include "ptl/experiment/metrics.hpp"
#include "ptl/replay/trajectory.hpp"

namespace ptl::experiment {

struct RolloutSpec {
  int steps = 1;
  replay::Origin origin = replay::Origin::kTargetOnline;
  int iteration = 0;
  std::uint64_t seed = 0;
  std::string id;
};

/// Closed-loop rollout of exactly `spec.steps` steps; drops are penalized, never
/// terminal. A null model selects uniform random actions in [-1, 1].
/// Planning and simulation failures propagate as exceptions.
replay::Trajectory collect_rollout(const envs::EnvParams& env, const dynamics::DynamicsModel* model,
                                   const planner::PlannerConfig& planner_cfg, const RolloutSpec& spec,
                                   nn::RngStream& env_rng, nn::RngStream& planner_rng);

/// Artifacts consumed by transfer runs.
struct SourceArtifacts {
  dynamics::DynamicsEnsemble model;
  std::vector<replay::Trajectory> trajectories;
};

struct SourceResult {
  SourceArtifacts artifacts;
  std::vector<IterationRecord> records;
};

/// Plain-ensemble model-based RL on the source env: iteration 0 uses random
/// actions, later iterations plan with the ensemble trained on all data so far.
SourceResult run_source_training(const RunConfig& cfg, std::uint64_t seed);

struct TransferResult {
  std::vector<IterationRecord> records;
  dynamics::AnyModel model;
  /// Final D_target composition (after eviction).
  std::vector<replay::Trajectory> buffer;
  /// D_selected, in selection order.
  std::vector<replay::Trajectory> selected;
  /// Every target-scene trajectory collected, in collection order.
  std::vector<replay::Trajectory> collected;
  /// Ids evicted from the buffer, in eviction order.
  std::vector<std::string> evicted;
  /// Source-origin fraction of D_target after each iteration's eviction.
  std::vector<double> source_fraction;
};

/// Transfer loop for every mode other than kSource. Modes that need source
/// artifacts throw ConfigError before any compute when `source` is null.
TransferResult run_transfer(const RunConfig& cfg, std::uint64_t seed, const SourceArtifacts* source);

/// Evaluates a model with `rollouts` MPC rollouts on `env` and returns one record.
IterationRecord evaluate_model(const RunConfig& cfg, const envs::EnvParams& env,
                               const dynamics::DynamicsModel& model, int rollouts, std::uint64_t seed,
                               std::vector<replay::Trajectory>* out_trajs = nullptr);

// Run-directory layout shared by the CLI and the tests.
inline constexpr const char* kConfigSnapshot = "config.json";
inline constexpr const char* kSourceCheckpoint = "source_model.json";
inline constexpr const char* kSourceStore = "source_trajectories.jsonl";

std::string target_config_name(const std::string& mode);
std::string target_checkpoint_name(const std::string& mode, std::uint64_t seed);
std::string target_store_name(const std::string& mode, std::uint64_t seed);

void write_source_run(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                      const SourceResult& result);
/// Throws ArtifactError if the checkpoint or store is missing.
SourceArtifacts load_source_run(const std::filesystem::path& dir);
void write_transfer_run(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                        const TransferResult& result);

}  // namespace ptl::experiment
