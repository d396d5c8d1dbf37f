#include "ptl/replay/trajectory.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "ptl/errors.hpp"

namespace ptl::replay {

std::string to_string(Origin o) {
  switch (o) {
    case Origin::kSource: return "source";
    case Origin::kTargetRandom: return "target_random";
    case Origin::kTargetOnline: return "target_online";
  }
  return "source";
}

Origin origin_from_string(const std::string& s) {
  if (s == "source") return Origin::kSource;
  if (s == "target_random") return Origin::kTargetRandom;
  if (s == "target_online") return Origin::kTargetOnline;
  throw RejectedInput("unknown trajectory origin '" + s + "'");
}

double Trajectory::total_reward() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }

double Trajectory::mean_final_score(int window) const {
  require(window >= 1, "final score window must be >= 1");
  require(!scores.empty(), "trajectory has no scores");
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(window), scores.size());
  return std::accumulate(scores.end() - static_cast<std::ptrdiff_t>(k), scores.end(), 0.0) /
         static_cast<double>(k);
}

void Trajectory::validate() const {
  require(!actions.empty(), "trajectory must have at least one step");
  require(states.size() == actions.size() + 1, "trajectory needs T+1 states for T actions");
  require(rewards.size() == actions.size() && scores.size() == actions.size(),
          "trajectory needs one reward and one score per step");
  const auto ds = states.front().size();
  for (const auto& s : states) require(s.size() == ds, "inconsistent state dimension");
  for (int idx : agent_state_indices)
    require(idx >= 0 && idx < ds, "agent_state_indices must lie in [0, d_s)");
}

std::vector<dynamics::Transition> to_transitions(const std::vector<Trajectory>& trajs) {
  std::vector<dynamics::Transition> out;
  std::size_t total = 0;
  for (const auto& t : trajs) total += t.actions.size();
  out.reserve(total);
  for (const auto& t : trajs)
    for (std::size_t i = 0; i < t.actions.size(); ++i)
      out.push_back({t.states[i], t.actions[i], t.rewards[i], t.states[i + 1]});
  return out;
}

void TrajectoryBuffer::add(Trajectory t) {
  if (capacity_ && trajectories_.size() >= *capacity_ && !trajectories_.empty())
    trajectories_.erase(trajectories_.begin());
  trajectories_.push_back(std::move(t));
}

void TrajectoryBuffer::add_all(const std::vector<Trajectory>& ts) {
  for (const auto& t : ts) add(t);
}

std::size_t TrajectoryBuffer::count(Origin o) const {
  return static_cast<std::size_t>(std::count_if(trajectories_.begin(), trajectories_.end(),
                                                [o](const Trajectory& t) { return t.origin == o; }));
}

double TrajectoryBuffer::fraction(Origin o) const {
  return empty() ? 0.0 : static_cast<double>(count(o)) / static_cast<double>(size());
}

std::size_t TrajectoryBuffer::remove_ids(const std::vector<std::string>& ids) {
  const std::unordered_set<std::string> drop(ids.begin(), ids.end());
  const auto before = trajectories_.size();
  std::erase_if(trajectories_, [&](const Trajectory& t) { return drop.contains(t.id); });
  return before - trajectories_.size();
}

}  // namespace ptl::replay
