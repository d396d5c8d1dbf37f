#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "oracles.hpp"
#include "ptl/dynamics/checkpoint.hpp"
#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/normalizer.hpp"
#include "ptl/dynamics/progressive.hpp"
#include "ptl/dynamics/training.hpp"
#include "ptl/errors.hpp"

using namespace ptl;
using dynamics::DynamicsEnsemble;
using dynamics::LateralInit;
using dynamics::ProgressiveModel;
using dynamics::Transition;
using dynamics::Wiring;

namespace {

std::vector<Transition> linear_system(int n, double gain, nn::RngStream& rng) {
  std::vector<Transition> data;
  for (int i = 0; i < n; ++i) {
    Transition t;
    t.state = oracle::random_matrix(2, 1, rng).col(0);
    t.action = oracle::random_matrix(2, 1, rng).col(0);
    t.next_state = t.state + gain * t.action;
    data.push_back(t);
  }
  return data;
}

bool same_bytes(const nn::MlpParams& a, const nn::MlpParams& b) {
  const auto x = a.tensors(), y = b.tensors();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].size() != y[i].size() || std::memcmp(x[i].data(), y[i].data(), x[i].size_bytes()) != 0) return false;
  return true;
}

ProgressiveModel random_progressive(Wiring w, nn::RngStream& rng, LateralInit li = LateralInit::kRandom) {
  auto source = DynamicsEnsemble::create(3, 2, 8, 2, rng);
  return dynamics::init_progressive_from_source(source, 1, w, rng, li);
}

}  // namespace

TEST(Normalizer, FitUsesPopulationStatsWithFloor) {
  std::vector<Transition> data(2);
  data[0] = {Vector::Constant(1, 1.0), Vector::Constant(1, 0.0), 0.0, Vector::Constant(1, 2.0)};
  data[1] = {Vector::Constant(1, 3.0), Vector::Constant(1, 0.0), 0.0, Vector::Constant(1, 4.0)};
  const auto n = dynamics::Normalizer::fit(data);
  EXPECT_DOUBLE_EQ(n.input_mean[0], 2.0);
  EXPECT_DOUBLE_EQ(n.input_std[0], 1.0);
  EXPECT_DOUBLE_EQ(n.input_std[1], dynamics::kStdFloor);
  EXPECT_DOUBLE_EQ(n.output_mean[0], 1.0);
  EXPECT_DOUBLE_EQ(n.output_std[0], dynamics::kStdFloor);
}

TEST(Normalizer, DenormalizeInvertsNormalize) {
  nn::RngStream rng(1, 0);
  const auto n = dynamics::Normalizer::fit(linear_system(50, 0.3, rng));
  const Matrix d = oracle::random_matrix(2, 10, rng);
  EXPECT_LT((n.denormalize_deltas(n.normalize_deltas(d)) - d).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Progressive, ZeroLateralWeightsReduceToTargetColumn) {
  nn::RngStream rng(2, 0);
  for (Wiring w : {Wiring::kPtl, Wiring::kPnnOut}) {
    ProgressiveModel pm = random_progressive(w, rng);
    for (auto& L : pm.lateral_weights) L.setZero();
    const Matrix z = oracle::random_matrix(5, 200, rng, 3.0);
    EXPECT_EQ(dynamics::progressive_trace(pm, z).target.output, nn::mlp_forward_batch(pm.target_column, z));
  }
}

TEST(Progressive, ZeroLateralScaleReducesToTargetColumn) {
  nn::RngStream rng(3, 0);
  ProgressiveModel pm = random_progressive(Wiring::kPtl, rng);
  pm.lateral_scales = {0.0, 0.0};
  const Matrix z = oracle::random_matrix(5, 200, rng, 3.0);
  EXPECT_EQ(dynamics::progressive_trace(pm, z).target.output, nn::mlp_forward_batch(pm.target_column, z));
}

TEST(Progressive, ZeroFrozenInitReducesWithinTolerance) {
  nn::RngStream rng(4, 0);
  const ProgressiveModel pm = random_progressive(Wiring::kPtl, rng, LateralInit::kZeroFrozen);
  EXPECT_TRUE(pm.lateral_frozen);
  const Matrix z = oracle::random_matrix(5, 1000, rng, 3.0);
  EXPECT_LE((dynamics::progressive_trace(pm, z).target.output - nn::mlp_forward_batch(pm.target_column, z))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Progressive, SingleUnitHandEvaluation) {
  // Source column: w = 1, b = 0.5. Target: w = 2, b = -1. L = 3, alpha = 0.5.
  // x = 2: h_S1 = 2.5, h_T1 = relu(2*2 - 1 + 3*relu(1.25)) = 6.75.
  // h_S2 = 3, h_T2 = relu(2*6.75 - 1 + 3*relu(1.5)) = 17.
  // out = 2*17 - 1 = 33.
  ProgressiveModel pm;
  pm.source_column = nn::MlpParams::zeros({1, 1, 1, 1});
  pm.target_column = nn::MlpParams::zeros({1, 1, 1, 1});
  for (int k = 0; k < nn::kLayerCount; ++k) {
    pm.source_column.weights[k].setConstant(1.0);
    pm.source_column.biases[k].setConstant(0.5);
    pm.target_column.weights[k].setConstant(2.0);
    pm.target_column.biases[k].setConstant(-1.0);
  }
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    pm.lateral_weights[k] = Matrix::Constant(1, 1, 3.0);
    pm.lateral_scales[k] = 0.5;
  }
  pm.normalizer = dynamics::Normalizer::identity(1, 1);
  pm.source_normalizer = pm.normalizer;
  const Matrix x = Matrix::Constant(1, 1, 2.0);
  const auto t = dynamics::progressive_trace(pm, x);
  EXPECT_DOUBLE_EQ(t.target.hidden[0](0, 0), 6.75);
  EXPECT_DOUBLE_EQ(t.target.hidden[1](0, 0), 17.0);
  EXPECT_DOUBLE_EQ(t.target.output(0, 0), 33.0);
  EXPECT_DOUBLE_EQ(oracle::progressive_reference_forward(pm, x)(0, 0), 33.0);
}

TEST(Progressive, PnnOutFeedsNextLayer) {
  // Same numbers; source hidden k enters target layer k+1:
  // h_T1 = relu(3) = 3; h_T2 = relu(2*3 - 1 + 3*relu(1.25)) = 8.75;
  // out = 2*8.75 - 1 + 3*relu(0.5*3) = 21.
  ProgressiveModel pm;
  pm.wiring = Wiring::kPnnOut;
  pm.source_column = nn::MlpParams::zeros({1, 1, 1, 1});
  pm.target_column = nn::MlpParams::zeros({1, 1, 1, 1});
  for (int k = 0; k < nn::kLayerCount; ++k) {
    pm.source_column.weights[k].setConstant(1.0);
    pm.source_column.biases[k].setConstant(0.5);
    pm.target_column.weights[k].setConstant(2.0);
    pm.target_column.biases[k].setConstant(-1.0);
  }
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    pm.lateral_weights[k] = Matrix::Constant(1, 1, 3.0);
    pm.lateral_scales[k] = 0.5;
  }
  pm.normalizer = dynamics::Normalizer::identity(1, 1);
  pm.source_normalizer = pm.normalizer;
  EXPECT_DOUBLE_EQ(dynamics::progressive_trace(pm, Matrix::Constant(1, 1, 2.0)).target.output(0, 0), 21.0);
}

TEST(Progressive, LossGradientMatchesFiniteDifferences) {
  nn::RngStream rng(5, 0);
  for (Wiring w : {Wiring::kPtl, Wiring::kPnnOut}) {
    int checked = 0;
    while (checked < 4) {
      ProgressiveModel pm = random_progressive(w, rng);
      oracle::randomize_biases(pm.target_column, rng);
      const Matrix x = oracle::random_matrix(5, 4, rng);
      const Matrix y = oracle::random_matrix(3, 4, rng);
      if (oracle::progressive_kink_margin(pm, x) < 1e-3) continue;
      const auto lg = dynamics::progressive_loss_and_grad(pm, x, y);
      EXPECT_NEAR(lg.loss, oracle::progressive_loss(pm, x, y), 1e-12);
      auto loss = [&] { return oracle::progressive_loss(pm, x, y); };
      auto params = pm.target_column.tensors();
      const auto grads = std::as_const(lg.grads.target_column).tensors();
      for (std::size_t i = 0; i < params.size(); ++i) EXPECT_LT(oracle::fd_check(params[i], grads[i], loss), 1e-4);
      for (int k = 0; k < nn::kHiddenCount; ++k) {
        Matrix& L = pm.lateral_weights[k];
        EXPECT_LT(oracle::fd_check({L.data(), static_cast<std::size_t>(L.size())},
                                    {lg.grads.lateral_weights[k].data(), static_cast<std::size_t>(L.size())}, loss),
                  1e-4);
        EXPECT_LT(oracle::fd_check({&pm.lateral_scales[k], 1}, {&lg.grads.lateral_scales[k], 1}, loss), 1e-4);
      }
      ++checked;
    }
  }
}

TEST(Progressive, InitIsDeterministicAndCopiesRequestedMember) {
  nn::RngStream base(6, 0);
  const auto source = DynamicsEnsemble::create(3, 2, 8, 3, base);
  nn::RngStream r1(7, 0), r2(7, 0), r3(7, 0);
  const auto a = dynamics::init_progressive_from_source(source, 0, Wiring::kPtl, r1);
  const auto b = dynamics::init_progressive_from_source(source, 0, Wiring::kPtl, r2);
  const auto c = dynamics::init_progressive_from_source(source, 2, Wiring::kPtl, r3);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a.source_column == source.members()[0]);
  EXPECT_TRUE(c.source_column == source.members()[2]);
  EXPECT_FALSE(a.source_column == c.source_column);
  EXPECT_EQ(a.source_column.layer_dims, a.target_column.layer_dims);
  for (double s : a.lateral_scales) {
    EXPECT_GE(s, 0.5);
    EXPECT_LE(s, 1.5);
  }
  EXPECT_THROW(dynamics::init_progressive_from_source(source, 3, Wiring::kPtl, r1), RejectedInput);
}

TEST(Progressive, TrainingLeavesSourceColumnBitwiseEqual) {
  nn::RngStream rng(8, 0);
  auto source = DynamicsEnsemble::create(2, 2, 16, 1, rng);
  ProgressiveModel pm = dynamics::init_progressive_from_source(source, 0, Wiring::kPtl, rng);
  const auto lateral_before = pm.lateral_weights;
  dynamics::TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 32;
  dynamics::train_dynamics(pm, linear_system(200, 0.1, rng), tc, rng);
  EXPECT_TRUE(same_bytes(pm.source_column, source.members()[0]));
  EXPECT_FALSE(pm.lateral_weights == lateral_before);
}

TEST(Progressive, SourceFeaturesIgnoreNormalizerRefit) {
  nn::RngStream rng(20, 0);
  auto source = DynamicsEnsemble::create(2, 2, 16, 1, rng);
  source.set_normalizer(dynamics::Normalizer::fit(linear_system(100, 0.5, rng)));
  ProgressiveModel pm = dynamics::init_progressive_from_source(source, 0, Wiring::kPtl, rng);
  const Matrix states = oracle::random_matrix(2, 20, rng), actions = oracle::random_matrix(2, 20, rng);
  auto source_hidden = [&] {
    return dynamics::progressive_trace(pm, pm.normalizer.normalize_inputs(states, actions)).source.hidden[1];
  };
  const Matrix before = source_hidden();
  auto shifted = linear_system(100, 0.1, rng);
  for (auto& t : shifted) t.state = 3.0 * t.state + Vector::Constant(2, 1.0);
  dynamics::TrainConfig tc;
  tc.epochs = 2;
  dynamics::train_dynamics(pm, shifted, tc, rng);
  ASSERT_FALSE(pm.normalizer == pm.source_normalizer);
  EXPECT_LT((source_hidden() - before).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Progressive, GradientHoldsWithDistinctNormalizers) {
  nn::RngStream rng(21, 0);
  ProgressiveModel pm = random_progressive(Wiring::kPtl, rng);
  for (int i = 0; i < 5; ++i) {
    pm.normalizer.input_mean[i] = rng.uniform(-1, 1);
    pm.normalizer.input_std[i] = rng.uniform(0.5, 2);
  }
  const Matrix x = oracle::random_matrix(5, 4, rng);
  const Matrix y = oracle::random_matrix(3, 4, rng);
  ASSERT_GT(oracle::progressive_kink_margin(pm, x), 1e-4);
  const auto lg = dynamics::progressive_loss_and_grad(pm, x, y);
  EXPECT_NEAR(lg.loss, oracle::progressive_loss(pm, x, y), 1e-12);
  auto loss = [&] { return oracle::progressive_loss(pm, x, y); };
  auto params = pm.target_column.tensors();
  const auto grads = std::as_const(lg.grads.target_column).tensors();
  for (std::size_t i = 0; i < params.size(); ++i) EXPECT_LT(oracle::fd_check(params[i], grads[i], loss), 1e-4);
}

TEST(Progressive, FrozenLateralStaysZeroDuringTraining) {
  nn::RngStream rng(9, 0);
  auto source = DynamicsEnsemble::create(2, 2, 16, 1, rng);
  ProgressiveModel pm = dynamics::init_progressive_from_source(source, 0, Wiring::kPtl, rng, LateralInit::kZeroFrozen);
  dynamics::TrainConfig tc;
  tc.epochs = 3;
  dynamics::train_dynamics(pm, linear_system(100, 0.1, rng), tc, rng);
  for (const auto& L : pm.lateral_weights) EXPECT_TRUE(L.isZero(0.0));
  EXPECT_EQ(pm.lateral_scales[0], 0.0);
  EXPECT_EQ(pm.lateral_scales[1], 0.0);
}

TEST(Ensemble, ZeroModelPredictsCurrentState) {
  DynamicsEnsemble e({nn::MlpParams::zeros({4, 5, 5, 2})}, dynamics::Normalizer::identity(4, 2));
  Vector s(2), a(2);
  s << 0.3, -1.2;
  a << 1.0, 0.5;
  const auto out = dynamics::predict_next_state(e, s, a);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], s);
}

TEST(Ensemble, IdenticalMembersPredictIdentically) {
  nn::RngStream rng(10, 0);
  const auto m = nn::MlpParams::random({4, 6, 6, 2}, rng);
  DynamicsEnsemble e({m, m, m}, dynamics::Normalizer::identity(4, 2));
  const auto out = dynamics::predict_next_state(e, Vector::Ones(2), Vector::Ones(2));
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[1], out[2]);
}

TEST(Ensemble, MembersDrawDistinctInitialisations) {
  nn::RngStream rng(11, nn::StreamId::kInit);
  const auto e = DynamicsEnsemble::create(3, 1, 8, 3, rng);
  EXPECT_FALSE(e.members()[0] == e.members()[1]);
  EXPECT_FALSE(e.members()[1] == e.members()[2]);
}

TEST(Ensemble, NonFinitePredictionThrows) {
  // Finite parameters whose hidden activations overflow.
  auto m = nn::MlpParams::zeros({4, 5, 5, 2});
  m.biases[0].setOnes();
  m.weights[1].setConstant(1e308);
  DynamicsEnsemble e({m}, dynamics::Normalizer::identity(4, 2));
  EXPECT_THROW(dynamics::predict_next_state(e, Vector::Zero(2), Vector::Zero(2)), ModelDiverged);
}

TEST(Training, ZeroResidualGivesZeroLoss) {
  std::vector<Transition> data;
  nn::RngStream rng(12, 0);
  for (int i = 0; i < 20; ++i) {
    Transition t;
    t.state = oracle::random_matrix(2, 1, rng).col(0);
    t.action = oracle::random_matrix(1, 1, rng).col(0);
    t.next_state = t.state;
    data.push_back(t);
  }
  DynamicsEnsemble e({nn::MlpParams::zeros({3, 4, 4, 2})}, dynamics::Normalizer::identity(3, 2));
  dynamics::TrainConfig tc;
  tc.epochs = 1;
  const auto h = dynamics::train_dynamics(e, data, tc, rng);
  EXPECT_EQ(h.front(), 0.0);
}

TEST(Training, SingleTransitionLossIsHalfSquaredDelta) {
  Transition t{Vector::Zero(2), Vector::Zero(1), 0.0, Vector::Zero(2)};
  t.next_state << 0.6, -0.8;
  DynamicsEnsemble e({nn::MlpParams::zeros({3, 4, 4, 2})}, dynamics::Normalizer::identity(3, 2));
  dynamics::TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 1;
  tc.refit_normalizer = false;
  nn::RngStream rng(13, 0);
  const std::vector<Transition> data{t};
  const auto h = dynamics::train_dynamics(e, data, tc, rng);
  EXPECT_DOUBLE_EQ(h.front(), 0.5);
}

TEST(Training, LinearSystemReachesLowLoss) {
  nn::RngStream rng(14, 0);
  const auto data = linear_system(5000, 0.1, rng);
  auto e = DynamicsEnsemble::create(2, 2, 64, 1, rng);
  dynamics::TrainConfig tc;
  tc.epochs = 200;
  tc.batch_size = 128;
  const auto h = dynamics::train_dynamics(e, data, tc, rng);
  EXPECT_LT(h.back(), 1e-4);
}

TEST(Training, IdentityPlusActionSystemGeneralises) {
  // Trained to convergence with a stepped-down learning rate; mean prediction
  // error on fresh points inside the training range.
  nn::RngStream rng(15, 0);
  const auto data = linear_system(4000, 1.0, rng);
  auto e = DynamicsEnsemble::create(2, 2, 64, 2, rng);
  dynamics::TrainConfig tc;
  tc.batch_size = 32;
  for (const auto& [lr, epochs] : {std::pair{3e-3, 60}, std::pair{1e-3, 60}, std::pair{1e-4, 40}}) {
    tc.adam.lr = lr;
    tc.epochs = epochs;
    dynamics::train_dynamics(e, data, tc, rng);
  }
  double total = 0.0;
  int count = 0;
  for (const auto& t : linear_system(200, 1.0, rng)) {
    for (const auto& p : dynamics::predict_next_state(e, t.state * 0.9, t.action * 0.9)) {
      total += (p - (t.state + t.action) * 0.9).norm();
      ++count;
    }
  }
  EXPECT_LT(total / count, 1e-3);
}

TEST(Training, EpochLossDecreasesForEverySeed) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    nn::RngStream rng(seed, nn::StreamId::kTraining);
    const auto data = linear_system(500, 0.1, rng);
    auto e = DynamicsEnsemble::create(2, 2, 16, 1, rng);
    dynamics::TrainConfig tc;
    tc.epochs = 200;
    tc.batch_size = 128;
    const auto h = dynamics::train_dynamics(e, data, tc, rng);
    EXPECT_LT(h[199], h[0]) << "seed " << seed;
  }
}

TEST(Training, EmptyDatasetRejected) {
  nn::RngStream rng(16, 0);
  auto e = DynamicsEnsemble::create(2, 2, 8, 1, rng);
  EXPECT_THROW(dynamics::train_dynamics(e, std::vector<Transition>{}, {}, rng), RejectedInput);
}

TEST(Training, DivergenceIsReported) {
  nn::RngStream rng(17, 0);
  auto data = linear_system(10, 0.1, rng);
  data[3].next_state[0] = NAN;
  auto e = DynamicsEnsemble::create(2, 2, 8, 1, rng);
  EXPECT_THROW(dynamics::train_dynamics(e, data, {}, rng), TrainingDiverged);
}

TEST(Checkpoint, ProgressiveRoundTripIsExact) {
  nn::RngStream rng(18, 0);
  for (Wiring w : {Wiring::kPtl, Wiring::kPnnOut}) {
    const ProgressiveModel pm = random_progressive(w, rng);
    EXPECT_TRUE(dynamics::progressive_from_json(dynamics::progressive_to_json(pm)) == pm);
  }
}

TEST(Checkpoint, ModelFilesRoundTripBothKinds) {
  nn::RngStream rng(19, 0);
  const auto dir = std::filesystem::temp_directory_path() / "ptl_test_dynamics";
  auto e = DynamicsEnsemble::create(3, 2, 6, 2, rng);
  auto n = dynamics::Normalizer::identity(5, 3);
  n.input_mean[1] = 0.1;
  n.output_std[2] = 1.0 / 3.0;
  e.set_normalizer(n);
  dynamics::save_model(e, dir / "e.json");
  EXPECT_TRUE(dynamics::load_ensemble(dir / "e.json") == e);
  const auto pe = dynamics::ProgressiveEnsemble::from_source(e, Wiring::kPtl, rng);
  dynamics::save_model(pe, dir / "p.json");
  const auto any = dynamics::load_model(dir / "p.json");
  ASSERT_TRUE(std::holds_alternative<dynamics::ProgressiveEnsemble>(any));
  EXPECT_TRUE(std::get<dynamics::ProgressiveEnsemble>(any) == pe);
  EXPECT_THROW(dynamics::load_ensemble(dir / "p.json"), ArtifactError);
  EXPECT_THROW(dynamics::load_model(dir / "missing.json"), ArtifactError);
  std::filesystem::remove_all(dir);
}
