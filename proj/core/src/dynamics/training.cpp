#include "ptl/dynamics/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptl/errors.hpp"

namespace ptl::dynamics {
namespace {

std::vector<std::span<const double>> grad_tensors(const ProgressiveGrads& g, bool with_lateral) {
  auto out = g.target_column.tensors();
  if (with_lateral) {
    for (int k = 0; k < nn::kHiddenCount; ++k)
      out.emplace_back(g.lateral_weights[k].data(), static_cast<std::size_t>(g.lateral_weights[k].size()));
    out.emplace_back(g.lateral_scales.data(), g.lateral_scales.size());
  }
  return out;
}

std::vector<std::span<double>> trainable_tensors(ProgressiveModel& pm) {
  auto out = pm.target_column.tensors();
  if (!pm.lateral_frozen) {
    for (int k = 0; k < nn::kHiddenCount; ++k)
      out.emplace_back(pm.lateral_weights[k].data(), static_cast<std::size_t>(pm.lateral_weights[k].size()));
    out.emplace_back(pm.lateral_scales.data(), pm.lateral_scales.size());
  }
  return out;
}

Matrix gather_columns(const Matrix& m, std::span<const Eigen::Index> idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(idx[i]);
  return out;
}

void check_loss(double loss) {
  if (!std::isfinite(loss)) throw TrainingDiverged("non-finite training loss");
}

// Shared epoch/minibatch loop. `step` runs one minibatch update and returns
// the summed per-sample loss of that batch.
template <typename StepFn>
std::vector<double> run_epochs(Eigen::Index n, const TrainConfig& cfg, nn::RngStream& rng,
                               StepFn&& step) {
  require(cfg.epochs >= 0 && cfg.batch_size >= 1, "epochs must be >= 0 and batch_size >= 1");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> history;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), order.size() - start);
      total += step(std::span<const Eigen::Index>(order.data() + start, len));
    }
    const double mean = total / static_cast<double>(n);
    check_loss(mean);
    history.push_back(mean);
  }
  return history;
}

void accumulate(std::vector<double>& acc, const std::vector<double>& h) {
  if (acc.empty()) acc.assign(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) acc[i] += h[i];
}

}  // namespace

MlpLossGrad mlp_loss_and_grad(const nn::MlpParams& params, const Matrix& z_inputs,
                              const Matrix& z_targets) {
  require(z_inputs.cols() == z_targets.cols() && z_inputs.cols() > 0, "empty or ragged batch");
  const double b = static_cast<double>(z_inputs.cols());
  const nn::MlpTrace trace = nn::mlp_forward_trace(params, z_inputs);
  const Matrix residual = trace.output - z_targets;
  MlpLossGrad out;
  out.loss = 0.5 * residual.squaredNorm() / b;
  out.grads = nn::mlp_backward(params, trace, residual / b).grads;
  return out;
}

ProgressiveLossGrad progressive_loss_and_grad(const ProgressiveModel& pm, const Matrix& z_inputs,
                                              const Matrix& z_targets, const nn::MlpTrace* source) {
  require(z_inputs.cols() == z_targets.cols() && z_inputs.cols() > 0, "empty or ragged batch");
  const double b = static_cast<double>(z_inputs.cols());
  const ProgressiveTrace t = progressive_trace(pm, z_inputs, source);
  const Matrix residual = t.target.output - z_targets;
  const nn::MlpBackward back = nn::mlp_backward(pm.target_column, t.target, residual / b);

  ProgressiveLossGrad out;
  out.loss = 0.5 * residual.squaredNorm() / b;
  out.grads.target_column = back.grads;
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    const Matrix& dz = back.pre_grads[pm.receiving_layer(k)];
    out.grads.lateral_weights[k] = dz * t.lateral[k].transpose();
    // d/da of F(a h) = 1[a h > 0] * h
    const Matrix d_lateral = pm.lateral_weights[k].transpose() * dz;
    const Matrix& hs = t.source.hidden[k];
    const Matrix gate = ((pm.lateral_scales[k] * hs).array() > 0.0).cast<double>();
    out.grads.lateral_scales[k] = (d_lateral.array() * gate.array() * hs.array()).sum();
  }
  return out;
}

PackedDataset pack_dataset(std::span<const Transition> data, const Normalizer& normalizer) {
  require(!data.empty(), "training dataset is empty");
  const auto n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index ds = data.front().state.size();
  const Eigen::Index da = data.front().action.size();
  Matrix states(ds, n), actions(da, n), deltas(ds, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tr = data[static_cast<std::size_t>(i)];
    require(tr.state.size() == ds && tr.action.size() == da && tr.next_state.size() == ds,
            "inconsistent transition dimensions");
    states.col(i) = tr.state;
    actions.col(i) = tr.action;
    deltas.col(i) = tr.next_state - tr.state;
  }
  return {normalizer.normalize_inputs(states, actions), normalizer.normalize_deltas(deltas)};
}

std::vector<double> train_dynamics(DynamicsEnsemble& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng) {
  require(!data.empty(), "training dataset is empty");
  if (cfg.refit_normalizer) model.set_normalizer(Normalizer::fit(data));
  const PackedDataset packed = pack_dataset(data, model.normalizer());
  std::vector<double> acc;
  for (int m = 0; m < model.member_count(); ++m) {
    nn::RngStream child = rng.fork(static_cast<std::uint64_t>(m));
    nn::MlpParams& params = model.members()[static_cast<std::size_t>(m)];
    nn::OptimizerState opt;
    auto history = run_epochs(packed.z_inputs.cols(), cfg, child, [&](std::span<const Eigen::Index> idx) {
      const Matrix x = gather_columns(packed.z_inputs, idx);
      const Matrix y = gather_columns(packed.z_targets, idx);
      const MlpLossGrad lg = mlp_loss_and_grad(params, x, y);
      check_loss(lg.loss);
      const auto p = params.tensors();
      const auto g = lg.grads.tensors();
      nn::adam_step(p, g, opt, cfg.adam);
      return lg.loss * static_cast<double>(idx.size());
    });
    accumulate(acc, history);
  }
  for (double& v : acc) v /= static_cast<double>(model.member_count());
  return acc;
}

std::vector<double> train_dynamics(ProgressiveModel& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng) {
  require(!data.empty(), "training dataset is empty");
  if (cfg.refit_normalizer) model.normalizer = Normalizer::fit(data);
  const PackedDataset packed = pack_dataset(data, model.normalizer);
  // The source column is frozen, so its activations are computed once.
  const nn::MlpTrace source_all =
      nn::mlp_forward_trace(model.source_column, source_column_inputs(model, packed.z_inputs));
  nn::OptimizerState opt;
  return run_epochs(packed.z_inputs.cols(), cfg, rng, [&](std::span<const Eigen::Index> idx) {
    nn::MlpTrace src;
    src.input = gather_columns(source_all.input, idx);
    for (int k = 0; k < nn::kHiddenCount; ++k) {
      src.pre[k] = gather_columns(source_all.pre[k], idx);
      src.hidden[k] = gather_columns(source_all.hidden[k], idx);
    }
    src.output = gather_columns(source_all.output, idx);
    const Matrix z = gather_columns(packed.z_inputs, idx);
    const Matrix y = gather_columns(packed.z_targets, idx);
    const ProgressiveLossGrad lg = progressive_loss_and_grad(model, z, y, &src);
    check_loss(lg.loss);
    const auto p = trainable_tensors(model);
    const auto g = grad_tensors(lg.grads, !model.lateral_frozen);
    nn::adam_step(p, g, opt, cfg.adam);
    return lg.loss * static_cast<double>(idx.size());
  });
}

std::vector<double> train_dynamics(ProgressiveEnsemble& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng) {
  require(!data.empty(), "training dataset is empty");
  std::vector<double> acc;
  for (int m = 0; m < model.member_count(); ++m) {
    nn::RngStream child = rng.fork(static_cast<std::uint64_t>(m));
    accumulate(acc, train_dynamics(model.members()[static_cast<std::size_t>(m)], data, cfg, child));
  }
  for (double& v : acc) v /= static_cast<double>(model.member_count());
  return acc;
}

}  // namespace ptl::dynamics
