#include "ptl/experiment/experiment.hpp"

#include <chrono>

#include "ptl/errors.hpp"
#include "ptl/replay/selection.hpp"
#include "ptl/replay/store.hpp"

namespace ptl::experiment {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One stream per component, all derived from the run seed.
struct Streams {
  explicit Streams(std::uint64_t seed)
      : env(seed, nn::StreamId::kEnv),
        planner(seed, nn::StreamId::kPlanner),
        init(seed, nn::StreamId::kInit),
        selection(seed, nn::StreamId::kSelection),
        training(seed, nn::StreamId::kTraining) {}
  nn::RngStream env, planner, init, selection, training;
};

IterationRecord summarize(const RunConfig& cfg, int iteration, const std::vector<replay::Trajectory>& trajs,
                          long long datapoints, double wall) {
  IterationRecord rec;
  rec.iteration = iteration;
  for (const auto& t : trajs) {
    rec.mean_reward += t.total_reward();
    rec.mean_score += t.mean_final_score(cfg.selection.final_score_window);
  }
  rec.mean_reward /= static_cast<double>(trajs.size());
  rec.mean_score /= static_cast<double>(trajs.size());
  const SuccessRates sr = success_rates(trajs, cfg.reward_threshold, cfg.score_threshold,
                                        cfg.selection.final_score_window);
  rec.sr_reward = sr.reward;
  rec.sr_score = sr.score;
  rec.datapoints = datapoints;
  rec.wall_seconds = wall;
  return rec;
}

std::string rollout_id(const char* prefix, std::uint64_t seed, int iteration, int index) {
  return std::string(prefix) + "-s" + std::to_string(seed) + "-i" + std::to_string(iteration) + "-r" +
         std::to_string(index);
}

std::vector<replay::Trajectory> collect_batch(const envs::EnvParams& env, const dynamics::DynamicsModel* model,
                                              const RunConfig& cfg, int count, replay::Origin origin,
                                              int iteration, std::uint64_t seed, const char* prefix,
                                              Streams& streams) {
  std::vector<replay::Trajectory> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    nn::RngStream env_rng = streams.env.fork(static_cast<std::uint64_t>(r));
    nn::RngStream plan_rng = streams.planner.fork(static_cast<std::uint64_t>(r));
    const RolloutSpec spec{cfg.steps_per_rollout, origin, iteration, seed, rollout_id(prefix, seed, iteration, r)};
    out.push_back(collect_rollout(env, model, cfg.planner, spec, env_rng, plan_rng));
  }
  return out;
}

// Trainable target-scene model for each transfer mode.
struct TargetModel {
  dynamics::AnyModel model;

  const dynamics::DynamicsModel& get() const { return dynamics::as_model(model); }

  std::vector<double> train(const std::vector<replay::Trajectory>& data, const dynamics::TrainConfig& tc,
                            nn::RngStream& rng) {
    const auto transitions = replay::to_transitions(data);
    return std::visit([&](auto& m) { return dynamics::train_dynamics(m, transitions, tc, rng); }, model);
  }
};

TargetModel make_target_model(const RunConfig& cfg, const SourceArtifacts* source, nn::RngStream& init) {
  const int ds = envs::state_dim(cfg.target_env.kind);
  const int da = envs::action_dim(cfg.target_env.kind);
  switch (cfg.mode) {
    case Mode::kScratch:
      return {dynamics::DynamicsEnsemble::create(ds, da, cfg.model.hidden, cfg.model.ensemble_size, init)};
    case Mode::kFinetune:
    case Mode::kFinetuneScratch:
      return {source->model};
    case Mode::kPtl:
      return {dynamics::ProgressiveEnsemble::from_source(source->model, dynamics::Wiring::kPtl, init,
                                                         cfg.model.lateral_init)};
    case Mode::kPnnOut:
      return {dynamics::ProgressiveEnsemble::from_source(source->model, dynamics::Wiring::kPnnOut, init,
                                                         cfg.model.lateral_init)};
    case Mode::kSource:
      break;
  }
  throw ConfigError("mode \"source\" is not a transfer mode; use train-source");
}

}  // namespace

replay::Trajectory collect_rollout(const envs::EnvParams& env, const dynamics::DynamicsModel* model,
                                   const planner::PlannerConfig& planner_cfg, const RolloutSpec& spec,
                                   nn::RngStream& env_rng, nn::RngStream& planner_rng) {
  require(spec.steps >= 1, "rollout length must be >= 1");
  replay::Trajectory traj;
  traj.id = spec.id;
  traj.origin = spec.origin;
  traj.iteration_created = spec.iteration;
  traj.seed = spec.seed;
  traj.env_params = env;
  traj.agent_state_indices = envs::agent_state_indices(env.kind);

  const int da = envs::action_dim(env.kind);
  const envs::RewardFn reward = envs::make_reward_fn(env);
  envs::EnvState state = envs::env_reset(env, env_rng);
  planner::PlanState plan = planner::PlanState::zeros(planner_cfg, da);
  traj.states.push_back(state.values);
  for (int t = 0; t < spec.steps; ++t) {
    Vector action(da);
    if (model == nullptr) {
      for (int j = 0; j < da; ++j) action[j] = planner_rng.uniform(-1.0, 1.0);
    } else {
      planner::PlanResult pr = planner::plan_action(*model, reward, state, plan, planner_cfg, planner_rng);
      action = pr.action;
      plan = std::move(pr.next_state);
    }
    const envs::StepResult step = envs::env_step(state, action, env);
    traj.actions.push_back(action);
    traj.rewards.push_back(step.reward);
    traj.scores.push_back(step.score);
    traj.states.push_back(step.next.values);
    state = step.next;
  }
  return traj;
}

SourceResult run_source_training(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto t0 = Clock::now();
  Streams streams(seed);
  const envs::EnvParams& env = cfg.source_env;
  SourceResult result;
  result.artifacts.model = dynamics::DynamicsEnsemble::create(
      envs::state_dim(env.kind), envs::action_dim(env.kind), cfg.model.hidden, cfg.model.ensemble_size,
      streams.init);
  long long datapoints = 0;
  const int iterations = cfg.resolved_source_iterations();
  for (int it = 0; it < iterations; ++it) {
    const dynamics::DynamicsModel* planner_model = it == 0 ? nullptr : &result.artifacts.model;
    auto batch = collect_batch(env, planner_model, cfg, cfg.rollouts_per_iter, replay::Origin::kSource, it,
                               seed, "src", streams);
    datapoints += static_cast<long long>(cfg.rollouts_per_iter) * cfg.steps_per_rollout;
    result.records.push_back(summarize(cfg, it, batch, datapoints, seconds_since(t0)));
    result.artifacts.trajectories.insert(result.artifacts.trajectories.end(), batch.begin(), batch.end());
    const auto transitions = replay::to_transitions(result.artifacts.trajectories);
    dynamics::train_dynamics(result.artifacts.model, transitions, cfg.model.train, streams.training);
  }
  return result;
}

TransferResult run_transfer(const RunConfig& cfg, std::uint64_t seed, const SourceArtifacts* source) {
  cfg.validate();
  if (cfg.mode == Mode::kSource) throw ConfigError("mode \"source\" is not a transfer mode; use train-source");
  if (needs_source_model(cfg.mode) && source == nullptr)
    throw ConfigError("mode \"" + to_string(cfg.mode) + "\" requires source artifacts (checkpoint and store)");
  if (needs_source_model(cfg.mode)) {
    const auto& m = source->model;
    if (m.state_dim() != envs::state_dim(cfg.target_env.kind) || m.action_dim() != envs::action_dim(cfg.target_env.kind))
      throw ConfigError("source model dimensions do not match the target env");
  }
  const auto t0 = Clock::now();
  Streams streams(seed);
  TargetModel target = make_target_model(cfg, source, streams.init);
  TransferResult result;
  if (cfg.iterations == 0) {
    result.model = std::move(target.model);
    return result;
  }

  replay::TrajectoryBuffer buffer;
  replay::SelectionConfig selection = cfg.selection;
  if (!uses_source_data(cfg.mode)) selection.strategy = replay::SelectionStrategy::kNone;
  if (selection.strategy != replay::SelectionStrategy::kNone && source != nullptr && !source->trajectories.empty()) {
    replay::TrajectoryBuffer source_buffer;
    source_buffer.add_all(source->trajectories);
    result.selected = replay::select_transfer_samples(source_buffer, selection, streams.selection);
    buffer.add_all(result.selected);
  }

  const std::size_t n_selected = buffer.size();
  const int n_random = cfg.random_rollouts > 0 ? cfg.random_rollouts
                       : n_selected > 0        ? static_cast<int>(n_selected)
                                               : cfg.rollouts_per_iter;
  const envs::EnvParams& env = cfg.target_env;
  auto random_batch = collect_batch(env, nullptr, cfg, n_random, replay::Origin::kTargetRandom, -1, seed,
                                    "rand", streams);
  buffer.add_all(random_batch);
  result.collected = random_batch;
  long long datapoints = static_cast<long long>(n_random) * cfg.steps_per_rollout;
  target.train(buffer.trajectories(), cfg.model.train, streams.training);

  for (int it = 0; it < cfg.iterations; ++it) {
    auto batch = collect_batch(env, &target.get(), cfg, cfg.rollouts_per_iter, replay::Origin::kTargetOnline,
                               it, seed, "tgt", streams);
    datapoints += static_cast<long long>(cfg.rollouts_per_iter) * cfg.steps_per_rollout;
    buffer.add_all(batch);
    result.collected.insert(result.collected.end(), batch.begin(), batch.end());
    const auto evicted = replay::evict_outdated(buffer, it, cfg.eviction, cfg.selection);
    result.evicted.insert(result.evicted.end(), evicted.begin(), evicted.end());
    result.source_fraction.push_back(buffer.fraction(replay::Origin::kSource));
    target.train(buffer.trajectories(), cfg.model.train, streams.training);
    result.records.push_back(summarize(cfg, it, batch, datapoints, seconds_since(t0)));
  }
  result.buffer = buffer.trajectories();
  result.model = std::move(target.model);
  return result;
}

IterationRecord evaluate_model(const RunConfig& cfg, const envs::EnvParams& env,
                               const dynamics::DynamicsModel& model, int rollouts, std::uint64_t seed,
                               std::vector<replay::Trajectory>* out_trajs) {
  require(rollouts >= 1, "evaluation needs at least one rollout");
  cfg.validate();
  const auto t0 = Clock::now();
  Streams streams(seed);
  auto batch = collect_batch(env, &model, cfg, rollouts, replay::Origin::kTargetOnline, 0, seed, "eval", streams);
  IterationRecord rec = summarize(cfg, 0, batch, static_cast<long long>(rollouts) * cfg.steps_per_rollout,
                                  seconds_since(t0));
  if (out_trajs != nullptr) *out_trajs = std::move(batch);
  return rec;
}

std::string target_config_name(const std::string& mode) { return "config_" + mode + ".json"; }

std::string target_checkpoint_name(const std::string& mode, std::uint64_t seed) {
  return "model_" + mode + "_seed" + std::to_string(seed) + ".json";
}

std::string target_store_name(const std::string& mode, std::uint64_t seed) {
  return "trajectories_" + mode + "_seed" + std::to_string(seed) + ".jsonl";
}

void write_source_run(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                      const SourceResult& result) {
  std::filesystem::create_directories(dir);
  save_config(cfg, dir / kConfigSnapshot);
  dynamics::save_model(result.artifacts.model, dir / kSourceCheckpoint);
  replay::write_store(dir / kSourceStore, result.artifacts.trajectories);
  write_metrics_csv(result.records, dir / metrics_file_name("source", seed));
}

SourceArtifacts load_source_run(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / kSourceCheckpoint))
    throw ArtifactError("missing source checkpoint " + (dir / kSourceCheckpoint).string());
  if (!std::filesystem::exists(dir / kSourceStore))
    throw ArtifactError("missing source trajectory store " + (dir / kSourceStore).string());
  SourceArtifacts a;
  a.model = dynamics::load_ensemble(dir / kSourceCheckpoint);
  a.trajectories = replay::TrajectoryStore(dir / kSourceStore).load();
  return a;
}

void write_transfer_run(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                        const TransferResult& result) {
  std::filesystem::create_directories(dir);
  const std::string mode = to_string(cfg.mode);
  save_config(cfg, dir / target_config_name(mode));
  std::visit([&](const auto& m) { dynamics::save_model(m, dir / target_checkpoint_name(mode, seed)); },
             result.model);
  // D_target history: selected source trajectories, then target rollouts; evictions as tombstones.
  const auto store_path = dir / target_store_name(mode, seed);
  replay::write_store(store_path, result.selected);
  replay::TrajectoryStore store(store_path);
  store.append(result.collected);
  store.tombstone(result.evicted);
  write_metrics_csv(result.records, dir / metrics_file_name(mode, seed));
}

}  // namespace ptl::experiment
