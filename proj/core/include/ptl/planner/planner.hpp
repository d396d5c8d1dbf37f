#pragma once

#include <vector>

#include "ptl/dynamics/model.hpp"
#include "ptl/envs/env.hpp"
#include "ptl/nn/rng.hpp"
#include "ptl/types.hpp"

namespace ptl::planner {

struct PlannerConfig {
  int horizon = 7;
  int candidates = 200;
  double filter_beta = 0.7;         ///< n_t = beta * u_t + (1 - beta) * n_{t-1}
  double reward_temperature = 1.0;  ///< gamma in exp(gamma * R_k)
  double noise_sigma = 0.3;         ///< u_t ~ N(0, sigma^2)
  int refinement_iters = 1;

  void validate() const;
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

/// Warm-start state carried between consecutive control steps.
struct PlanState {
  Matrix mean;        ///< H x d_a running action mean
  Matrix prev_noise;  ///< N x d_a filtered noise seeding the next step's filter

  static PlanState zeros(const PlannerConfig& cfg, int action_dim);
};

struct PlanResult {
  Vector action;
  PlanState next_state;
  /// Refined H x d_a mean before the warm-start shift.
  Matrix refined_mean;
  /// Best candidate return seen in the last refinement pass.
  double best_return = 0.0;
};

/// One MPC step with filtered-noise candidate generation and reward-weighted
/// refinement. Candidates are evaluated against every model member; their
/// returns are averaged over members. Throws PlanningFailed if no candidate
/// has a finite return.
PlanResult plan_action(const dynamics::DynamicsModel& model, const envs::RewardFn& reward,
                       const envs::EnvState& state, const PlanState& plan_state,
                       const PlannerConfig& cfg, nn::RngStream& rng);

/// Reward-weighted mean of candidate sequences (each H x d_a) around `mean`:
/// mean + sum_k w_k (a_k - mean), w = softmax(gamma * R). Non-finite returns get
/// zero weight.
Matrix reward_weighted_mean(const Matrix& mean, const std::vector<Matrix>& candidates,
                            const std::vector<double>& returns, double temperature);

struct RolloutPrediction {
  /// states[m][h] is member m's predicted state after h+1 actions.
  std::vector<std::vector<Vector>> states;
  /// Sum of rewards over the predicted steps, averaged across members.
  double cumulative_reward = 0.0;
};

/// Rolls one action sequence forward under every model member.
/// Propagates ModelDiverged from the model.
RolloutPrediction rollout_model(const dynamics::DynamicsModel& model, const envs::EnvState& state,
                                const std::vector<Vector>& actions, const envs::RewardFn& reward);

}  // namespace ptl::planner
