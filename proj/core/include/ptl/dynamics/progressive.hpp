#pragma once

#include <array>
#include <string>
#include <vector>

#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/model.hpp"
#include "ptl/dynamics/normalizer.hpp"
#include "ptl/nn/mlp.hpp"

namespace ptl::dynamics {

/// Where the source column's hidden outputs enter the target column.
///
///  kPtl:    source hidden layer k feeds target hidden layer k, inside the ReLU:
///           h_T^k = F(W_T^k h_T^{k-1} + b^k + L^k F(a^k h_S^k)),  k = 1, 2.
///  kPnnOut: the original progressive-network wiring, shifted one layer up:
///           source hidden layer k feeds the layer that consumes target layer k's
///           output (hidden 2 for k = 1, the linear output for k = 2).
enum class Wiring { kPtl, kPnnOut };

std::string to_string(Wiring w);
Wiring wiring_from_string(const std::string& s);

/// How lateral parameters are initialized.
enum class LateralInit {
  kRandom,      ///< scaled-uniform L^k, a^k ~ U[0.5, 1.5]; trainable
  kZeroFrozen,  ///< L^k = 0, a^k = 0 and excluded from training
};

/// Two-column progressive dynamics model. The source column is frozen; the
/// target column, lateral weights and lateral scales are trainable.
struct ProgressiveModel {
  nn::MlpParams source_column;
  nn::MlpParams target_column;
  /// PTL: L^k is (n_T^k x n_S^k). PNN_OUT: L^k is (dim of layer k+1 x n_S^k).
  std::array<Matrix, nn::kHiddenCount> lateral_weights;
  std::array<double, nn::kHiddenCount> lateral_scales{};
  Wiring wiring = Wiring::kPtl;
  /// Refit with the training data; applies to the target column and the output.
  Normalizer normalizer;
  /// Input statistics the source column was trained with. Never refit, so the
  /// frozen column computes the same function of (s, a) throughout transfer.
  Normalizer source_normalizer;
  bool lateral_frozen = false;

  /// 0-based layer index of the target column that receives source hidden layer k.
  int receiving_layer(int k) const { return wiring == Wiring::kPtl ? k : k + 1; }

  int state_dim() const { return target_column.output_dim(); }
  int action_dim() const { return target_column.input_dim() - target_column.output_dim(); }

  /// Throws RejectedInput on any shape inconsistency.
  void validate() const;

  friend bool operator==(const ProgressiveModel&, const ProgressiveModel&) = default;
};

/// Forward activations of both columns for a batch of normalized inputs.
struct ProgressiveTrace {
  nn::MlpTrace source;
  std::array<Matrix, nn::kHiddenCount> lateral;  ///< F(a^k h_S^k)
  std::array<Matrix, nn::kLayerCount> injected;  ///< lateral term per target layer (zero if none)
  nn::MlpTrace target;
};

/// Source-column inputs for target-normalized inputs `z_inputs`.
Matrix source_column_inputs(const ProgressiveModel& pm, const Matrix& z_inputs);

/// Forward on normalized inputs (columns are samples); `source` may carry a
/// precomputed trace of the frozen column for the same inputs.
ProgressiveTrace progressive_trace(const ProgressiveModel& pm, const Matrix& z_inputs,
                                   const nn::MlpTrace* source = nullptr);

/// Raw-unit state delta predicted for one (state, action).
Vector progressive_forward(const ProgressiveModel& pm, const Vector& state, const Vector& action);
Matrix progressive_forward_batch(const ProgressiveModel& pm, const Matrix& states,
                                 const Matrix& actions);

/// Copies source member `member_index` into a frozen source column and draws a
/// fresh target column (first) and lateral parameters (second) from `rng`.
ProgressiveModel init_progressive_from_source(const DynamicsEnsemble& source, int member_index,
                                              Wiring wiring, nn::RngStream& rng,
                                              LateralInit lateral = LateralInit::kRandom);

/// Model_target = {f_0^T, ..., f_M^T}: one progressive model per source member.
class ProgressiveEnsemble final : public DynamicsModel {
 public:
  ProgressiveEnsemble() = default;
  explicit ProgressiveEnsemble(std::vector<ProgressiveModel> members);

  /// Member m uses source member m and draws from `rng.fork(m)`.
  static ProgressiveEnsemble from_source(const DynamicsEnsemble& source, Wiring wiring,
                                         nn::RngStream& rng,
                                         LateralInit lateral = LateralInit::kRandom);

  int member_count() const override { return static_cast<int>(members_.size()); }
  int state_dim() const override { return members_.front().state_dim(); }
  int action_dim() const override { return members_.front().action_dim(); }
  Matrix predict_next_batch(int member, const Matrix& states, const Matrix& actions) const override;

  const std::vector<ProgressiveModel>& members() const { return members_; }
  std::vector<ProgressiveModel>& members() { return members_; }

  friend bool operator==(const ProgressiveEnsemble& a, const ProgressiveEnsemble& b) {
    return a.members_ == b.members_;
  }

 private:
  std::vector<ProgressiveModel> members_;
};

}  // namespace ptl::dynamics
