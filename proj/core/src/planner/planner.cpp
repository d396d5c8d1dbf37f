#include "ptl/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptl/errors.hpp"

namespace ptl::planner {

void PlannerConfig::validate() const {
  require(horizon >= 1, "horizon must be >= 1");
  require(candidates >= 1, "candidates must be >= 1");
  require(filter_beta > 0.0 && filter_beta <= 1.0, "filter_beta must lie in (0, 1]");
  require(reward_temperature > 0.0, "reward_temperature must be positive");
  require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  require(refinement_iters >= 1, "refinement_iters must be >= 1");
}

PlanState PlanState::zeros(const PlannerConfig& cfg, int action_dim) {
  return {Matrix::Zero(cfg.horizon, action_dim), Matrix::Zero(cfg.candidates, action_dim)};
}

Matrix reward_weighted_mean(const Matrix& mean, const std::vector<Matrix>& candidates,
                            const std::vector<double>& returns, double temperature) {
  require(candidates.size() == returns.size() && !candidates.empty(),
          "one return per candidate is required");
  double best = -std::numeric_limits<double>::infinity();
  for (double r : returns)
    if (std::isfinite(r)) best = std::max(best, r);
  if (!std::isfinite(best)) throw PlanningFailed("every candidate return is non-finite");
  std::vector<double> w(returns.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < returns.size(); ++k) {
    if (!std::isfinite(returns[k])) continue;
    w[k] = std::exp(temperature * (returns[k] - best));
    total += w[k];
  }
  Matrix update = Matrix::Zero(mean.rows(), mean.cols());
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (w[k] > 0.0) update += (w[k] / total) * (candidates[k] - mean);
  return mean + update;
}

namespace {

// Average (over members) return of every candidate; candidates[k] is H x d_a.
std::vector<double> evaluate_candidates(const dynamics::DynamicsModel& model,
                                        const envs::RewardFn& reward, const envs::EnvState& state,
                                        const std::vector<Matrix>& candidates, int horizon) {
  const auto n = static_cast<Eigen::Index>(candidates.size());
  const int da = model.action_dim();
  std::vector<double> returns(candidates.size(), 0.0);
  std::vector<Matrix> actions(static_cast<std::size_t>(horizon), Matrix(da, n));
  for (int h = 0; h < horizon; ++h)
    for (Eigen::Index k = 0; k < n; ++k)
      actions[static_cast<std::size_t>(h)].col(k) = candidates[static_cast<std::size_t>(k)].row(h).transpose();

  for (int m = 0; m < model.member_count(); ++m) {
    Matrix states = state.values.replicate(1, n);
    for (int h = 0; h < horizon; ++h) {
      const Matrix& a = actions[static_cast<std::size_t>(h)];
      states = model.predict_next_batch(m, states, a);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double r = states.col(k).allFinite()
                             ? reward(states.col(k), a.col(k), state.step + h + 1)
                             : std::numeric_limits<double>::quiet_NaN();
        returns[static_cast<std::size_t>(k)] += r;
      }
    }
  }
  for (double& r : returns) r /= static_cast<double>(model.member_count());
  return returns;
}

}  // namespace

PlanResult plan_action(const dynamics::DynamicsModel& model, const envs::RewardFn& reward,
                       const envs::EnvState& state, const PlanState& plan_state,
                       const PlannerConfig& cfg, nn::RngStream& rng) {
  cfg.validate();
  const int da = model.action_dim();
  require(state.values.size() == model.state_dim(), "state dimension does not match the model");
  require(plan_state.mean.rows() == cfg.horizon && plan_state.mean.cols() == da &&
              plan_state.prev_noise.rows() == cfg.candidates && plan_state.prev_noise.cols() == da,
          "plan state shape does not match the planner config");

  Matrix mean = plan_state.mean.cwiseMax(-1.0).cwiseMin(1.0);
  Matrix carried = plan_state.prev_noise;
  const int carry_step = std::min(1, cfg.horizon - 1);
  std::vector<double> returns;
  for (int iter = 0; iter < cfg.refinement_iters; ++iter) {
    std::vector<Matrix> candidates(static_cast<std::size_t>(cfg.candidates));
    Matrix next_carry(cfg.candidates, da);
    for (int k = 0; k < cfg.candidates; ++k) {
      Matrix seq(cfg.horizon, da);
      Eigen::RowVectorXd noise = plan_state.prev_noise.row(k);
      for (int t = 0; t < cfg.horizon; ++t) {
        for (int j = 0; j < da; ++j) {
          const double u = rng.normal(0.0, cfg.noise_sigma);
          noise[j] = cfg.filter_beta * u + (1.0 - cfg.filter_beta) * noise[j];
        }
        if (t == carry_step) next_carry.row(k) = noise;
        seq.row(t) = (mean.row(t) + noise).cwiseMax(-1.0).cwiseMin(1.0);
      }
      candidates[static_cast<std::size_t>(k)] = std::move(seq);
    }
    carried = std::move(next_carry);
    returns = evaluate_candidates(model, reward, state, candidates, cfg.horizon);
    mean = reward_weighted_mean(mean, candidates, returns, cfg.reward_temperature);
  }

  PlanResult out;
  out.refined_mean = mean;
  out.action = mean.row(0).transpose().cwiseMax(-1.0).cwiseMin(1.0);
  out.best_return = *std::max_element(returns.begin(), returns.end(), [](double a, double b) {
    if (!std::isfinite(a)) return true;
    if (!std::isfinite(b)) return false;
    return a < b;
  });
  out.next_state.mean = Matrix(cfg.horizon, da);
  if (cfg.horizon > 1) out.next_state.mean.topRows(cfg.horizon - 1) = mean.bottomRows(cfg.horizon - 1);
  out.next_state.mean.row(cfg.horizon - 1) = mean.row(cfg.horizon - 1);
  out.next_state.prev_noise = std::move(carried);
  return out;
}

RolloutPrediction rollout_model(const dynamics::DynamicsModel& model, const envs::EnvState& state,
                                const std::vector<Vector>& actions, const envs::RewardFn& reward) {
  RolloutPrediction out;
  out.states.resize(static_cast<std::size_t>(model.member_count()));
  if (actions.empty()) return out;
  double total = 0.0;
  for (int m = 0; m < model.member_count(); ++m) {
    Vector s = state.values;
    for (std::size_t h = 0; h < actions.size(); ++h) {
      s = model.predict_next_batch(m, s, actions[h]);
      if (!s.allFinite()) throw ModelDiverged("rollout produced a non-finite state");
      total += reward(s, actions[h], state.step + static_cast<int>(h) + 1);
      out.states[static_cast<std::size_t>(m)].push_back(s);
    }
  }
  out.cumulative_reward = total / static_cast<double>(model.member_count());
  return out;
}

}  // namespace ptl::planner
