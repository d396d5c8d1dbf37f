#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ptl::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter set. Moment tensors mirror the
/// parameter tensors in count and size.
struct OptimizerState {
  std::uint64_t step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

/// One bias-corrected adaptive-moment update, in place. The optimizer state is
/// lazily shaped on the first call. Throws TrainingDiverged on non-finite
/// gradients (parameters are left untouched in that case).
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, OptimizerState& state,
               const AdamConfig& cfg);

}  // namespace ptl::nn
