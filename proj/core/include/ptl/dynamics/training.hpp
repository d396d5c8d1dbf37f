#pragma once

#include <span>
#include <vector>

#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/progressive.hpp"
#include "ptl/dynamics/transition.hpp"
#include "ptl/nn/adam.hpp"

namespace ptl::dynamics {

struct TrainConfig {
  int epochs = 40;
  int batch_size = 512;
  nn::AdamConfig adam{};
  /// Refit the normalizer on the dataset before training.
  bool refit_normalizer = true;
};

/// Value and gradient of L = mean_i 1/2 ||target_i - f(input_i)||^2 on
/// normalized data (one sample per column).
struct MlpLossGrad {
  double loss = 0.0;
  nn::MlpGradients grads;
};
MlpLossGrad mlp_loss_and_grad(const nn::MlpParams& params, const Matrix& z_inputs,
                              const Matrix& z_targets);

/// Gradients of the trainable progressive parameters.
struct ProgressiveGrads {
  nn::MlpGradients target_column;
  std::array<Matrix, nn::kHiddenCount> lateral_weights;
  std::array<double, nn::kHiddenCount> lateral_scales{};
};
struct ProgressiveLossGrad {
  double loss = 0.0;
  ProgressiveGrads grads;
};
ProgressiveLossGrad progressive_loss_and_grad(const ProgressiveModel& pm, const Matrix& z_inputs,
                                              const Matrix& z_targets,
                                              const nn::MlpTrace* source = nullptr);

/// Training data packed as normalized matrices.
struct PackedDataset {
  Matrix z_inputs;
  Matrix z_targets;
};
PackedDataset pack_dataset(std::span<const Transition> data, const Normalizer& normalizer);

/// Minibatch training of every member on the same dataset. Member m shuffles
/// with `rng.fork(m)`. Returns the per-epoch loss (normalized units, averaged
/// over samples and members). Throws RejectedInput on an empty dataset and
/// TrainingDiverged on a non-finite loss.
std::vector<double> train_dynamics(DynamicsEnsemble& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng);
std::vector<double> train_dynamics(ProgressiveEnsemble& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng);
/// Single progressive column pair. Only the target column and (unless frozen)
/// the lateral parameters change.
std::vector<double> train_dynamics(ProgressiveModel& model, std::span<const Transition> data,
                                   const TrainConfig& cfg, nn::RngStream& rng);

}  // namespace ptl::dynamics
