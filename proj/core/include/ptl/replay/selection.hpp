#pragma once

#include <span>
#include <string>
#include <vector>

#include "ptl/nn/rng.hpp"
#include "ptl/replay/trajectory.hpp"

namespace ptl::replay {

/// kPrioritized draws with the median-split priority probabilities; kUniform
/// draws with equal probabilities (the "uniform" ablation); kNone selects nothing.
enum class SelectionStrategy { kPrioritized, kUniform, kNone };

std::string to_string(SelectionStrategy s);
SelectionStrategy selection_strategy_from_string(const std::string& s);

struct SelectionConfig {
  double lambda1 = 0.4;     ///< reward vs. final-score balance in the priority value
  double rho = 0.1;         ///< probability interpolation around the median
  double rho_number = 0.1;  ///< fraction of the source buffer to select
  int final_score_window = 5;
  SelectionStrategy strategy = SelectionStrategy::kPrioritized;

  void validate() const;
  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

/// Mean squared step of the agent coordinates: (1/T) sum_t ||s_{t+1}^a - s_t^a||^2.
double state_transition_divergence(const Trajectory& traj);

/// (lambda1 * Reward + (1 - lambda1) * MeanScore) * exp(-StateTD).
double priority_value(const Trajectory& traj, const SelectionConfig& cfg);

/// Sample median; even counts average the two central order statistics.
double median(std::vector<double> values);

/// Median-split probabilities, normalized to sum to one. Values within 1e-12
/// of the median count as equal to it.
std::vector<double> sampling_probabilities(std::span<const double> pvs, double rho);

/// ceil(rho_number * n), at least 1 for a non-empty buffer.
std::size_t selection_count(std::size_t n, double rho_number);

/// Indices of distinct items drawn by sequential weighted sampling without replacement.
std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> probs,
                                                             std::size_t count, nn::RngStream& rng);

/// Computes priorities, then draws ceil(rho_number * N) distinct trajectories
/// (D_selected). Returned trajectories keep their origin label.
std::vector<Trajectory> select_transfer_samples(const TrajectoryBuffer& buffer,
                                                const SelectionConfig& cfg, nn::RngStream& rng);

struct EvictionPolicy {
  double fraction = 0.1;  ///< share of remaining source trajectories removed per call
};

/// Removes ceil(fraction * n_source) source-origin trajectories with the lowest
/// priority value. Target-origin trajectories are never touched. Returns the
/// removed ids.
std::vector<std::string> evict_outdated(TrajectoryBuffer& buffer, int iteration,
                                        const EvictionPolicy& policy, const SelectionConfig& cfg);

}  // namespace ptl::replay
