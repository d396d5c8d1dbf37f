#include "ptl/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "ptl/errors.hpp"

namespace ptl::nn {
namespace {

void check_dims(const LayerDims& dims) {
  for (int d : dims) require(d > 0, "layer dims must be positive");
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

}  // namespace

MlpParams MlpParams::zeros(const LayerDims& dims) {
  check_dims(dims);
  MlpParams p;
  p.layer_dims = dims;
  for (int k = 0; k < kLayerCount; ++k) {
    p.weights[k] = Matrix::Zero(dims[k + 1], dims[k]);
    p.biases[k] = Vector::Zero(dims[k + 1]);
  }
  return p;
}

MlpParams MlpParams::random(const LayerDims& dims, RngStream& rng) {
  MlpParams p = zeros(dims);
  for (int k = 0; k < kLayerCount; ++k) {
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[k] + dims[k + 1]));
    Matrix& w = p.weights[k];
    // Row-major fill order so the draw sequence matches the checkpoint layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
  }
  return p;
}

void MlpParams::validate() const {
  check_dims(layer_dims);
  for (int k = 0; k < kLayerCount; ++k) {
    require(weights[k].rows() == layer_dims[k + 1] && weights[k].cols() == layer_dims[k],
            "weight matrix " + std::to_string(k) + " does not match layer_dims");
    require(biases[k].size() == layer_dims[k + 1],
            "bias vector " + std::to_string(k) + " does not match layer_dims");
  }
  require(all_finite(), "network parameters must be finite");
}

bool MlpParams::all_finite() const {
  for (int k = 0; k < kLayerCount; ++k)
    if (!weights[k].allFinite() || !biases[k].allFinite()) return false;
  return true;
}

std::vector<std::span<double>> MlpParams::tensors() {
  std::vector<std::span<double>> out;
  for (int k = 0; k < kLayerCount; ++k) {
    out.emplace_back(weights[k].data(), static_cast<std::size_t>(weights[k].size()));
    out.emplace_back(biases[k].data(), static_cast<std::size_t>(biases[k].size()));
  }
  return out;
}

std::vector<std::span<const double>> MlpParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (int k = 0; k < kLayerCount; ++k) {
    out.emplace_back(weights[k].data(), static_cast<std::size_t>(weights[k].size()));
    out.emplace_back(biases[k].data(), static_cast<std::size_t>(biases[k].size()));
  }
  return out;
}

bool operator==(const MlpParams& a, const MlpParams& b) {
  if (a.layer_dims != b.layer_dims) return false;
  for (int k = 0; k < kLayerCount; ++k)
    if (a.weights[k] != b.weights[k] || a.biases[k] != b.biases[k]) return false;
  return true;
}

MlpTrace mlp_forward_trace(const MlpParams& params, const Matrix& inputs,
                           const LayerInjections& inject) {
  require(inputs.rows() == params.input_dim(),
          "input length " + std::to_string(inputs.rows()) + " != d_in " +
              std::to_string(params.input_dim()));
  MlpTrace t;
  t.input = inputs;
  const Matrix* prev = &t.input;
  for (int k = 0; k < kHiddenCount; ++k) {
    t.pre[k] = params.weights[k] * (*prev);
    t.pre[k].colwise() += params.biases[k];
    if (inject[k] != nullptr) t.pre[k] += *inject[k];
    t.hidden[k] = relu(t.pre[k]);
    prev = &t.hidden[k];
  }
  t.output = params.weights[2] * (*prev);
  t.output.colwise() += params.biases[2];
  if (inject[2] != nullptr) t.output += *inject[2];
  return t;
}

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& inputs) {
  require(inputs.rows() == params.input_dim(), "input rows do not match d_in");
  Matrix h = params.weights[0] * inputs;
  h.colwise() += params.biases[0];
  h = relu(h);
  Matrix h2 = params.weights[1] * h;
  h2.colwise() += params.biases[1];
  h2 = relu(h2);
  Matrix out = params.weights[2] * h2;
  out.colwise() += params.biases[2];
  return out;
}

Vector mlp_forward(const MlpParams& params, const Vector& input) {
  return mlp_forward_batch(params, input);
}

MlpBackward mlp_backward(const MlpParams& params, const MlpTrace& trace,
                         const Matrix& output_grads) {
  require(output_grads.rows() == params.output_dim() &&
              output_grads.cols() == trace.output.cols(),
          "output gradient shape does not match the forward trace");
  MlpBackward b;
  b.grads.layer_dims = params.layer_dims;
  b.pre_grads[2] = output_grads;
  for (int k = kLayerCount - 1; k >= 0; --k) {
    const Matrix& g = b.pre_grads[k];
    const Matrix& layer_in = k == 0 ? trace.input : trace.hidden[k - 1];
    b.grads.weights[k] = g * layer_in.transpose();
    b.grads.biases[k] = g.rowwise().sum();
    if (k > 0) {
      Matrix upstream = params.weights[k].transpose() * g;
      b.pre_grads[k - 1] =
          (trace.pre[k - 1].array() > 0.0).select(upstream, Matrix::Zero(upstream.rows(), upstream.cols()));
    }
  }
  return b;
}

MlpGradients mlp_backward(const MlpParams& params, const Vector& input,
                          const Vector& output_grad) {
  const MlpTrace trace = mlp_forward_trace(params, input);
  return mlp_backward(params, trace, output_grad).grads;
}

}  // namespace ptl::nn
