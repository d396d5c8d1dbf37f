#pragma once

#include <vector>

#include "ptl/dynamics/model.hpp"
#include "ptl/dynamics/normalizer.hpp"
#include "ptl/nn/mlp.hpp"

namespace ptl::dynamics {

/// Plain delta-dynamics ensemble {f_0, ..., f_M}; all members share layer
/// dims and one normalizer.
class DynamicsEnsemble final : public DynamicsModel {
 public:
  DynamicsEnsemble() = default;
  DynamicsEnsemble(std::vector<nn::MlpParams> members, Normalizer normalizer);

  /// Fresh members; member m is initialized from `init.fork(m)` so member
  /// initializations do not depend on the ensemble size.
  static DynamicsEnsemble create(int state_dim, int action_dim, int hidden, int member_count,
                                 nn::RngStream& init);

  int member_count() const override { return static_cast<int>(members_.size()); }
  int state_dim() const override { return normalizer_.output_dim(); }
  int action_dim() const override { return normalizer_.input_dim() - normalizer_.output_dim(); }
  Matrix predict_next_batch(int member, const Matrix& states, const Matrix& actions) const override;

  const std::vector<nn::MlpParams>& members() const { return members_; }
  std::vector<nn::MlpParams>& members() { return members_; }
  const Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(Normalizer n);

  friend bool operator==(const DynamicsEnsemble& a, const DynamicsEnsemble& b) {
    return a.members_ == b.members_ && a.normalizer_ == b.normalizer_;
  }

 private:
  std::vector<nn::MlpParams> members_;
  Normalizer normalizer_;
};

}  // namespace ptl::dynamics
