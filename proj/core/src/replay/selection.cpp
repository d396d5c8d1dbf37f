#include "ptl/replay/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptl/errors.hpp"

namespace ptl::replay {
namespace {
constexpr double kMedianTolerance = 1e-12;
}

std::string to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kPrioritized: return "prioritized";
    case SelectionStrategy::kUniform: return "uniform";
    case SelectionStrategy::kNone: return "none";
  }
  return "prioritized";
}

SelectionStrategy selection_strategy_from_string(const std::string& s) {
  if (s == "prioritized") return SelectionStrategy::kPrioritized;
  if (s == "uniform") return SelectionStrategy::kUniform;
  if (s == "none") return SelectionStrategy::kNone;
  throw RejectedInput("unknown selection strategy '" + s + "'");
}

void SelectionConfig::validate() const {
  require(lambda1 >= 0.0 && lambda1 <= 1.0, "lambda1 must lie in [0, 1]");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  require(rho_number > 0.0 && rho_number <= 1.0, "rho_number must lie in (0, 1]");
  require(final_score_window >= 1, "final_score_window must be >= 1");
}

double state_transition_divergence(const Trajectory& traj) {
  require(!traj.agent_state_indices.empty(), "agent_state_indices is empty");
  require(traj.states.size() >= 2, "trajectory needs at least one transition");
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) {
    for (int idx : traj.agent_state_indices) {
      const double d = traj.states[t + 1][idx] - traj.states[t][idx];
      total += d * d;
    }
  }
  return total / static_cast<double>(traj.states.size() - 1);
}

double priority_value(const Trajectory& traj, const SelectionConfig& cfg) {
  const double base = cfg.lambda1 * traj.total_reward() +
                      (1.0 - cfg.lambda1) * traj.mean_final_score(cfg.final_score_window);
  return base * std::exp(-state_transition_divergence(traj));
}

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> sampling_probabilities(std::span<const double> pvs, double rho) {
  require(!pvs.empty(), "cannot compute probabilities of an empty list");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  const double med = median(std::vector<double>(pvs.begin(), pvs.end()));
  const double base = 1.0 / static_cast<double>(pvs.size());
  std::vector<double> p(pvs.size());
  for (std::size_t i = 0; i < pvs.size(); ++i) {
    if (std::abs(pvs[i] - med) <= kMedianTolerance) p[i] = base;
    else if (pvs[i] > med) p[i] = base * (1.0 + rho);
    else p[i] = base * (1.0 - rho);
  }
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return p;
}

std::size_t selection_count(std::size_t n, double rho_number) {
  if (n == 0) return 0;
  // Guard against 0.1 * 100 = 10.000000000000002 rounding up to 11.
  const double raw = rho_number * static_cast<double>(n);
  const double rounded = std::round(raw);
  const auto c = static_cast<std::size_t>(std::abs(raw - rounded) < 1e-9 ? rounded : std::ceil(raw));
  return std::clamp<std::size_t>(c, 1, n);
}

std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> probs,
                                                             std::size_t count, nn::RngStream& rng) {
  require(count <= probs.size(), "cannot draw more items than available");
  std::vector<double> w(probs.begin(), probs.end());
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t draw = 0; draw < count; ++draw) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double u = rng.uniform(0.0, total);
    std::size_t chosen = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      chosen = i;
      if (u < w[i]) break;
      u -= w[i];
    }
    require(chosen < w.size(), "no positive weight left to draw from");
    picked.push_back(chosen);
    w[chosen] = 0.0;
  }
  return picked;
}

std::vector<Trajectory> select_transfer_samples(const TrajectoryBuffer& buffer,
                                                const SelectionConfig& cfg, nn::RngStream& rng) {
  require(!buffer.empty(), "cannot select from an empty buffer");
  cfg.validate();
  if (cfg.strategy == SelectionStrategy::kNone) return {};
  const auto& trajs = buffer.trajectories();
  std::vector<double> probs;
  if (cfg.strategy == SelectionStrategy::kPrioritized) {
    std::vector<double> pvs;
    pvs.reserve(trajs.size());
    for (const auto& t : trajs) pvs.push_back(priority_value(t, cfg));
    probs = sampling_probabilities(pvs, cfg.rho);
  } else {
    probs.assign(trajs.size(), 1.0 / static_cast<double>(trajs.size()));
  }
  const auto idx = weighted_sample_without_replacement(
      probs, selection_count(trajs.size(), cfg.rho_number), rng);
  std::vector<Trajectory> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(trajs[i]);
  return out;
}

std::vector<std::string> evict_outdated(TrajectoryBuffer& buffer, int /*iteration*/,
                                        const EvictionPolicy& policy, const SelectionConfig& cfg) {
  require(policy.fraction >= 0.0 && policy.fraction <= 1.0, "eviction fraction must lie in [0, 1]");
  std::vector<std::pair<double, std::size_t>> source;
  const auto& trajs = buffer.trajectories();
  for (std::size_t i = 0; i < trajs.size(); ++i)
    if (trajs[i].origin == Origin::kSource) source.emplace_back(priority_value(trajs[i], cfg), i);
  if (source.empty() || policy.fraction == 0.0) return {};
  const auto n_evict = selection_count(source.size(), policy.fraction);
  // Lowest PV first; ties broken by insertion order.
  std::stable_sort(source.begin(), source.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < n_evict; ++k) ids.push_back(trajs[source[k].second].id);
  buffer.remove_ids(ids);
  return ids;
}

}  // namespace ptl::replay
