#include <benchmark/benchmark.h>

#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/progressive.hpp"
#include "ptl/envs/env.hpp"
#include "ptl/nn/mlp.hpp"
#include "ptl/planner/planner.hpp"

using namespace ptl;

static void BM_MlpForwardBatch(benchmark::State& state) {
  const auto batch = static_cast<int>(state.range(0));
  nn::RngStream rng(1, nn::StreamId::kInit);
  const auto params = nn::MlpParams::random({16, 200, 200, 12}, rng);
  const Matrix x = Matrix::Random(16, batch);
  for (auto _ : state) benchmark::DoNotOptimize(nn::mlp_forward_batch(params, x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(200)->Arg(700);

static void BM_ProgressivePredict(benchmark::State& state) {
  nn::RngStream rng(2, nn::StreamId::kInit);
  const auto source = dynamics::DynamicsEnsemble::create(12, 4, 200, 1, rng);
  const auto model = dynamics::ProgressiveEnsemble::from_source(source, dynamics::Wiring::kPtl, rng);
  const Matrix s = Matrix::Random(12, 700), a = Matrix::Random(4, 700);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_next_batch(0, s, a));
  state.SetItemsProcessed(state.iterations() * 700);
}
BENCHMARK(BM_ProgressivePredict);

static void BM_EnvStep(benchmark::State& state) {
  const auto env = envs::orbit2_params(0.3, 0.3);
  nn::RngStream rng(3, nn::StreamId::kEnv);
  const envs::EnvState s = envs::env_reset(env, rng);
  const Vector a = Vector::Constant(4, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(envs::env_step(s, a, env));
}
BENCHMARK(BM_EnvStep);

static void BM_PlanAction(benchmark::State& state) {
  const auto env = envs::orbit2_params(0.3, 0.3);
  nn::RngStream rng(4, nn::StreamId::kInit), pr(4, nn::StreamId::kPlanner);
  const auto model = dynamics::DynamicsEnsemble::create(12, 4, 64, 2, rng);
  planner::PlannerConfig cfg;
  cfg.candidates = static_cast<int>(state.range(0));
  const envs::EnvState s = envs::env_reset(env, rng);
  const auto ps = planner::PlanState::zeros(cfg, 4);
  const auto reward = envs::make_reward_fn(env);
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_action(model, reward, s, ps, cfg, pr));
}
BENCHMARK(BM_PlanAction)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
