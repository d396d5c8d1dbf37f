#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "ptl/errors.hpp"
#include "ptl/nn/adam.hpp"
#include "ptl/nn/checkpoint.hpp"
#include "ptl/nn/mlp.hpp"

using namespace ptl;
using nn::MlpParams;

namespace {

MlpParams single_path(double w, double b) {
  MlpParams p = MlpParams::zeros({1, 1, 1, 1});
  for (int k = 0; k < nn::kLayerCount; ++k) {
    p.weights[k].setConstant(w);
    p.biases[k].setConstant(b);
  }
  return p;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(MlpForward, ZeroNetworkGivesZero) {
  const MlpParams p = MlpParams::zeros({3, 5, 4, 2});
  EXPECT_EQ(nn::mlp_forward(p, vec({1.0, -2.0, 7.0})), Vector::Zero(2));
}

TEST(MlpForward, SinglePathHandEvaluation) {
  // hidden1 = relu(2*3+1) = 7, hidden2 = relu(2*7+1) = 15, out = 2*15+1 = 31
  const auto t = nn::mlp_forward_trace(single_path(2.0, 1.0), vec({3.0}));
  EXPECT_DOUBLE_EQ(t.hidden[0](0, 0), 7.0);
  EXPECT_DOUBLE_EQ(t.hidden[1](0, 0), 15.0);
  EXPECT_DOUBLE_EQ(t.output(0, 0), 31.0);
}

TEST(MlpForward, ReluClampsNegativeInput) {
  const auto t = nn::mlp_forward_trace(single_path(1.0, 0.0), vec({-5.0}));
  EXPECT_EQ(t.hidden[0](0, 0), 0.0);
}

TEST(MlpForward, BatchMatchesSingle) {
  nn::RngStream rng(1, 0);
  const MlpParams p = MlpParams::random({4, 6, 5, 3}, rng);
  const Matrix x = oracle::random_matrix(4, 7, rng);
  const Matrix y = nn::mlp_forward_batch(p, x);
  for (int c = 0; c < 7; ++c) EXPECT_EQ(Vector(y.col(c)), nn::mlp_forward(p, x.col(c)));
}

TEST(MlpForward, ReluLayerIsOneLipschitzForSubstochasticRows) {
  nn::RngStream rng(2, 0);
  MlpParams p = MlpParams::zeros({4, 4, 4, 4});
  for (auto& w : p.weights) {
    w = oracle::random_matrix(4, 4, rng);
    for (int r = 0; r < 4; ++r) w.row(r) /= w.row(r).cwiseAbs().sum();
  }
  for (int trial = 0; trial < 100; ++trial) {
    const Vector a = oracle::random_matrix(4, 1, rng, 5.0).col(0);
    const Vector b = oracle::random_matrix(4, 1, rng, 5.0).col(0);
    const auto ta = nn::mlp_forward_trace(p, a), tb = nn::mlp_forward_trace(p, b);
    EXPECT_LE((ta.hidden[0] - tb.hidden[0]).cwiseAbs().maxCoeff(), (a - b).cwiseAbs().maxCoeff() + 1e-15);
    EXPECT_LE((ta.hidden[1] - tb.hidden[1]).cwiseAbs().maxCoeff(),
              (ta.hidden[0] - tb.hidden[0]).cwiseAbs().maxCoeff() + 1e-15);
  }
}

TEST(MlpParamsTest, RandomInitIsBoundedAndBiasFree) {
  nn::RngStream rng(3, 0);
  const MlpParams p = MlpParams::random({8, 16, 16, 8}, rng);
  for (int k = 0; k < nn::kLayerCount; ++k) {
    const double bound = std::sqrt(6.0 / (p.layer_dims[k] + p.layer_dims[k + 1]));
    EXPECT_LE(p.weights[k].cwiseAbs().maxCoeff(), bound);
    EXPECT_EQ(p.biases[k], Vector::Zero(p.layer_dims[k + 1]));
    EXPECT_EQ(p.weights[k].rows(), p.layer_dims[k + 1]);
    EXPECT_EQ(p.weights[k].cols(), p.layer_dims[k]);
  }
}

TEST(MlpParamsTest, ValidateRejectsBadShapesAndNonFinite) {
  MlpParams p = MlpParams::zeros({2, 3, 3, 1});
  EXPECT_NO_THROW(p.validate());
  p.weights[1](0, 0) = NAN;
  EXPECT_THROW(p.validate(), RejectedInput);
  p = MlpParams::zeros({2, 3, 3, 1});
  p.weights[2] = Matrix::Zero(2, 3);
  EXPECT_THROW(p.validate(), RejectedInput);
}

TEST(MlpParamsTest, ForwardRejectsWrongInputLength) {
  EXPECT_THROW(nn::mlp_forward(MlpParams::zeros({2, 3, 3, 1}), vec({1.0})), RejectedInput);
}

TEST(MlpBackward, ZeroOutputGradGivesZeroGradients) {
  nn::RngStream rng(4, 0);
  const MlpParams p = MlpParams::random({3, 4, 4, 2}, rng);
  const auto g = nn::mlp_backward(p, vec({0.5, -1.0, 2.0}), Vector::Zero(2));
  for (const auto& t : std::as_const(g).tensors())
    for (double v : t) EXPECT_EQ(v, 0.0);
}

TEST(MlpBackward, LinearOutputLayerGradIsOuterProduct) {
  nn::RngStream rng(5, 0);
  const MlpParams p = MlpParams::random({3, 4, 4, 2}, rng);
  const Vector x = vec({0.5, -1.0, 2.0});
  const Vector g_out = vec({0.7, -0.2});
  const auto t = nn::mlp_forward_trace(p, x);
  const auto g = nn::mlp_backward(p, x, g_out);
  const Matrix expected = g_out * t.hidden[1].col(0).transpose();
  EXPECT_LT((g.weights[2] - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(g.biases[2], g_out);
}

TEST(MlpBackward, MatchesFiniteDifferencesOn3442) {
  nn::RngStream rng(6, 0);
  MlpParams p = MlpParams::random({3, 4, 4, 2}, rng);
  oracle::randomize_biases(p, rng);
  const Matrix x = oracle::random_matrix(3, 1, rng);
  const Matrix y = oracle::random_matrix(2, 1, rng);
  ASSERT_GT(oracle::plain_kink_margin(p, x), 1e-3);
  const auto t = nn::mlp_forward_trace(p, x);
  auto g = nn::mlp_backward(p, t, t.output - y).grads;
  auto params = p.tensors();
  const auto grads = std::as_const(g).tensors();
  for (std::size_t i = 0; i < params.size(); ++i)
    EXPECT_LT(oracle::fd_check(params[i], grads[i], [&] { return oracle::plain_loss(p, x, y); }), 1e-4);
}

TEST(MlpBackward, MatchesFiniteDifferencesOnRandomNetworks) {
  // Property: dims up to (8, 16, 16, 8), h = 1e-5.
  nn::RngStream rng(7, 0);
  int checked = 0;
  while (checked < 10) {
    const auto d0 = static_cast<int>(rng.uniform_int(1, 8));
    const auto d1 = static_cast<int>(rng.uniform_int(1, 16));
    const auto d2 = static_cast<int>(rng.uniform_int(1, 16));
    const auto d3 = static_cast<int>(rng.uniform_int(1, 8));
    MlpParams p = MlpParams::random({d0, d1, d2, d3}, rng);
    oracle::randomize_biases(p, rng);
    const Matrix x = oracle::random_matrix(d0, 3, rng);
    const Matrix y = oracle::random_matrix(d3, 3, rng);
    if (oracle::plain_kink_margin(p, x) < 1e-3) continue;
    const auto t = nn::mlp_forward_trace(p, x);
    auto g = nn::mlp_backward(p, t, (t.output - y) / 3.0).grads;
    auto params = p.tensors();
    const auto grads = std::as_const(g).tensors();
    for (std::size_t i = 0; i < params.size(); ++i)
      EXPECT_LT(oracle::fd_check(params[i], grads[i], [&] { return oracle::plain_loss(p, x, y); }), 1e-4);
    ++checked;
  }
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  std::vector<double> w{1.0, -2.0};
  const std::vector<double> g{0.0, 0.0};
  std::vector<std::span<double>> ps{w};
  std::vector<std::span<const double>> gs{g};
  nn::OptimizerState st;
  nn::adam_step(ps, gs, st, {});
  EXPECT_EQ(w, (std::vector<double>{1.0, -2.0}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  std::vector<double> w{0.5};
  const std::vector<double> g{0.3};
  std::vector<std::span<double>> ps{w};
  std::vector<std::span<const double>> gs{g};
  nn::OptimizerState st;
  const nn::AdamConfig cfg{};
  nn::adam_step(ps, gs, st, cfg);
  EXPECT_NEAR(0.5 - w[0], cfg.lr * 0.3 / (0.3 + cfg.epsilon), 1e-15);
  EXPECT_EQ(st.step_count, 1u);
}

TEST(Adam, ConstantGradientMovesMonotonically) {
  std::vector<double> w{0.0, 0.0};
  const std::vector<double> g{1.5, -0.25};
  std::vector<std::span<double>> ps{w};
  std::vector<std::span<const double>> gs{g};
  nn::OptimizerState st;
  nn::adam_step(ps, gs, st, {});
  const auto after_one = w;
  nn::adam_step(ps, gs, st, {});
  EXPECT_LT(after_one[0], 0.0);
  EXPECT_LT(w[0], after_one[0]);
  EXPECT_GT(after_one[1], 0.0);
  EXPECT_GT(w[1], after_one[1]);
}

TEST(Adam, NonFiniteGradientThrowsWithoutUpdating) {
  std::vector<double> w{1.0, 2.0};
  const std::vector<double> g{0.1, INFINITY};
  std::vector<std::span<double>> ps{w};
  std::vector<std::span<const double>> gs{g};
  nn::OptimizerState st;
  EXPECT_THROW(nn::adam_step(ps, gs, st, {}), TrainingDiverged);
  EXPECT_EQ(w, (std::vector<double>{1.0, 2.0}));
}

TEST(Determinism, SameSeedSameParametersAfterUpdates) {
  auto run = [] {
    nn::RngStream rng(9, nn::StreamId::kInit);
    MlpParams p = MlpParams::random({3, 8, 8, 2}, rng);
    nn::OptimizerState st;
    const Matrix x = oracle::random_matrix(3, 16, rng);
    const Matrix y = oracle::random_matrix(2, 16, rng);
    for (int i = 0; i < 25; ++i) {
      const auto t = nn::mlp_forward_trace(p, x);
      auto g = nn::mlp_backward(p, t, t.output - y).grads;
      nn::adam_step(p.tensors(), std::as_const(g).tensors(), st, {});
    }
    return p;
  };
  EXPECT_TRUE(run() == run());
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  nn::RngStream a(5, nn::StreamId::kEnv), b(5, nn::StreamId::kEnv), c(5, nn::StreamId::kPlanner);
  const double x = a.uniform(0, 1);
  EXPECT_EQ(x, b.uniform(0, 1));
  EXPECT_NE(x, c.uniform(0, 1));
  nn::RngStream f1 = a.fork(1), f2 = b.fork(1);
  EXPECT_EQ(f1.normal(0, 1), f2.normal(0, 1));
}

TEST(Checkpoint, RoundTripIsExact) {
  nn::RngStream rng(10, 0);
  MlpParams p = MlpParams::random({5, 7, 6, 3}, rng);
  oracle::randomize_biases(p, rng);
  p.weights[0](0, 0) = 1.0 / 3.0;
  p.weights[1](2, 1) = 5e-324;
  EXPECT_TRUE(nn::mlp_from_json(nn::mlp_to_json(p)) == p);
  const auto path = std::filesystem::temp_directory_path() / "ptl_test_nn" / "mlp.json";
  nn::save_mlp(p, path);
  EXPECT_TRUE(nn::load_mlp(path) == p);
  std::filesystem::remove_all(path.parent_path());
}

TEST(Checkpoint, RejectsMalformedJson) {
  EXPECT_THROW(nn::mlp_from_json("{\"version\":1}"), ArtifactError);
  EXPECT_THROW(nn::mlp_from_json("not json"), ArtifactError);
}
