#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptl/dynamics/transition.hpp"
#include "ptl/envs/env.hpp"
#include "ptl/types.hpp"

namespace ptl::replay {

enum class Origin { kSource, kTargetRandom, kTargetOnline };

std::string to_string(Origin o);
Origin origin_from_string(const std::string& s);

/// One rollout of T steps: T+1 states, T actions, T rewards, T scores.
struct Trajectory {
  std::string id;
  Origin origin = Origin::kSource;
  int iteration_created = 0;
  std::uint64_t seed = 0;
  envs::EnvParams env_params;
  std::vector<Vector> states;
  std::vector<Vector> actions;
  std::vector<double> rewards;
  std::vector<double> scores;
  std::vector<int> agent_state_indices;

  int length() const { return static_cast<int>(actions.size()); }
  double total_reward() const;
  /// Mean of the last `window` per-step scores (all scores if T < window).
  double mean_final_score(int window) const;

  /// Throws RejectedInput if lengths or agent indices are inconsistent.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// T quadruples per trajectory, in order.
std::vector<dynamics::Transition> to_transitions(const std::vector<Trajectory>& trajs);

/// Insertion-ordered trajectory store (D_source, D_selected, D_target, ...).
class TrajectoryBuffer {
 public:
  TrajectoryBuffer() = default;
  explicit TrajectoryBuffer(std::optional<std::size_t> capacity) : capacity_(capacity) {}

  /// Appends; when at capacity the oldest trajectory is dropped first.
  void add(Trajectory t);
  void add_all(const std::vector<Trajectory>& ts);

  std::size_t size() const { return trajectories_.size(); }
  bool empty() const { return trajectories_.empty(); }
  std::size_t count(Origin o) const;
  double fraction(Origin o) const;

  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  std::optional<std::size_t> capacity() const { return capacity_; }

  /// Removes trajectories whose ids are listed and returns how many were removed.
  std::size_t remove_ids(const std::vector<std::string>& ids);

 private:
  std::vector<Trajectory> trajectories_;
  std::optional<std::size_t> capacity_;
};

}  // namespace ptl::replay
