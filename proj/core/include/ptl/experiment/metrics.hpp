#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ptl/replay/trajectory.hpp"

namespace ptl::experiment {

struct IterationRecord {
  int iteration = 0;
  double mean_reward = 0.0;
  double mean_score = 0.0;
  double sr_reward = 0.0;
  double sr_score = 0.0;
  long long datapoints = 0;  ///< cumulative environment steps in the target (or source) scene
  double wall_seconds = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SuccessRates {
  double reward = 0.0;  ///< fraction with total reward >= RT
  double score = 0.0;   ///< fraction with mean final score >= ST
};

/// Throws RejectedInput on an empty set.
SuccessRates success_rates(const std::vector<replay::Trajectory>& trajs, double reward_threshold,
                           double score_threshold, int final_score_window);

inline constexpr const char* kMetricsHeader =
    "iter,mean_reward,mean_score,sr_reward,sr_score,datapoints,wall_seconds";

std::string format_metrics_csv(const std::vector<IterationRecord>& records);
void write_metrics_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path);
/// Throws ArtifactError naming the file on a missing file, bad header or bad row.
std::vector<IterationRecord> read_metrics_csv(const std::filesystem::path& path);

/// File name of the metrics CSV for one (mode, seed).
std::string metrics_file_name(const std::string& mode, std::uint64_t seed);

}  // namespace ptl::experiment
