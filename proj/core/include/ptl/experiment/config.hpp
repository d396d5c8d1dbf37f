#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ptl/dynamics/training.hpp"
#include "ptl/envs/env.hpp"
#include "ptl/planner/planner.hpp"
#include "ptl/replay/selection.hpp"

namespace ptl::experiment {

enum class Mode { kSource, kScratch, kFinetune, kFinetuneScratch, kPnnOut, kPtl };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);
/// Modes that consume a trained source ensemble.
bool needs_source_model(Mode m);
/// Modes that draw D_selected from the source trajectory store.
bool uses_source_data(Mode m);

struct ModelConfig {
  int hidden = 200;
  int ensemble_size = 3;
  dynamics::TrainConfig train{};
  dynamics::LateralInit lateral_init = dynamics::LateralInit::kRandom;

  friend bool operator==(const ModelConfig& a, const ModelConfig& b);
};

struct RunConfig {
  Mode mode = Mode::kPtl;
  int iterations = 50;
  int rollouts_per_iter = 30;
  int steps_per_rollout = 100;
  /// |D_target-random|; 0 selects |D_selected| (or rollouts_per_iter when nothing is selected).
  int random_rollouts = 0;
  /// Outer iterations of source training; 0 reuses `iterations`.
  int source_iterations = 0;

  replay::SelectionConfig selection{};
  replay::EvictionPolicy eviction{};
  planner::PlannerConfig planner{};
  ModelConfig model{};
  envs::EnvParams source_env = envs::orbit2_params(0.3, 0.3);
  envs::EnvParams target_env = envs::orbit2_params(0.15, 0.15);

  std::vector<std::uint64_t> seeds{0};
  double reward_threshold = -20.0;  ///< RT
  double score_threshold = -0.02;   ///< ST

  int resolved_source_iterations() const { return source_iterations > 0 ? source_iterations : iterations; }
  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Parses the nested {env, model, planner, selection, run} document. Omitted
/// fields take defaults; unknown keys are rejected by name. Throws ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace ptl::experiment
