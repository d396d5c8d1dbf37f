#pragma once

#include <array>
#include <span>
#include <vector>

#include "ptl/nn/rng.hpp"
#include "ptl/types.hpp"

namespace ptl::nn {

/// Layer sizes of the fixed architecture: input, two ReLU hidden layers, linear output.
using LayerDims = std::array<int, 4>;

inline constexpr int kLayerCount = 3;
inline constexpr int kHiddenCount = 2;

/// Weights of a two-hidden-layer feed-forward network. Layer k maps
/// layer_dims[k] -> layer_dims[k + 1]; weights[k] is (layer_dims[k+1] x layer_dims[k]).
struct MlpParams {
  LayerDims layer_dims{};
  std::array<Matrix, kLayerCount> weights;
  std::array<Vector, kLayerCount> biases;

  static MlpParams zeros(const LayerDims& dims);
  /// Scaled uniform init, bound sqrt(6 / (fan_in + fan_out)); biases start at zero.
  static MlpParams random(const LayerDims& dims, RngStream& rng);

  int input_dim() const { return layer_dims[0]; }
  int output_dim() const { return layer_dims[3]; }

  /// Throws RejectedInput if shapes disagree with layer_dims or any entry is non-finite.
  void validate() const;
  bool all_finite() const;

  /// Flat views over every tensor in a fixed order (w0, b0, w1, b1, w2, b2).
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

  friend bool operator==(const MlpParams& a, const MlpParams& b);
};

/// Gradients share the parameter layout.
using MlpGradients = MlpParams;

/// Forward activations for a batch; every matrix holds one sample per column.
struct MlpTrace {
  Matrix input;
  std::array<Matrix, kHiddenCount> pre;     ///< pre-activation of hidden layers
  std::array<Matrix, kHiddenCount> hidden;  ///< F(pre), F(x) = max(0, x)
  Matrix output;
};

/// Optional additive pre-activation terms per layer (used by lateral connections).
/// A null entry contributes nothing.
using LayerInjections = std::array<const Matrix*, kLayerCount>;

Vector mlp_forward(const MlpParams& params, const Vector& input);
Matrix mlp_forward_batch(const MlpParams& params, const Matrix& inputs);
MlpTrace mlp_forward_trace(const MlpParams& params, const Matrix& inputs,
                           const LayerInjections& inject = {});

struct MlpBackward {
  MlpGradients grads;
  /// dL/d(pre-activation) of every layer, including the linear output layer.
  std::array<Matrix, kLayerCount> pre_grads;
};

/// Backpropagates `output_grads` (one column per sample in `trace`) and returns
/// parameter gradients summed over the batch.
MlpBackward mlp_backward(const MlpParams& params, const MlpTrace& trace,
                         const Matrix& output_grads);
MlpGradients mlp_backward(const MlpParams& params, const Vector& input,
                          const Vector& output_grad);

}  // namespace ptl::nn
