#include "ptl/dynamics/ensemble.hpp"

#include <string>

#include "ptl/errors.hpp"

namespace ptl::dynamics {

std::vector<Vector> predict_next_state(const DynamicsModel& model, const Vector& state,
                                       const Vector& action) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(model.member_count()));
  for (int m = 0; m < model.member_count(); ++m) {
    Vector next = model.predict_next_batch(m, state, action);
    if (!next.allFinite())
      throw ModelDiverged("member " + std::to_string(m) + " predicted a non-finite state");
    out.push_back(std::move(next));
  }
  return out;
}

DynamicsEnsemble::DynamicsEnsemble(std::vector<nn::MlpParams> members, Normalizer normalizer)
    : members_(std::move(members)), normalizer_(std::move(normalizer)) {
  require(!members_.empty(), "an ensemble needs at least one member");
  for (const auto& m : members_) {
    m.validate();
    require(m.layer_dims == members_.front().layer_dims, "ensemble members must share layer_dims");
  }
  require(normalizer_.input_dim() == members_.front().input_dim() &&
              normalizer_.output_dim() == members_.front().output_dim(),
          "normalizer does not match member dims");
}

DynamicsEnsemble DynamicsEnsemble::create(int state_dim, int action_dim, int hidden,
                                          int member_count, nn::RngStream& init) {
  require(member_count >= 1, "ensemble size must be >= 1");
  const nn::LayerDims dims{state_dim + action_dim, hidden, hidden, state_dim};
  std::vector<nn::MlpParams> members;
  for (int m = 0; m < member_count; ++m) {
    nn::RngStream child = init.fork(static_cast<std::uint64_t>(m));
    members.push_back(nn::MlpParams::random(dims, child));
  }
  return DynamicsEnsemble(std::move(members), Normalizer::identity(state_dim + action_dim, state_dim));
}

Matrix DynamicsEnsemble::predict_next_batch(int member, const Matrix& states,
                                            const Matrix& actions) const {
  require(member >= 0 && member < member_count(), "ensemble member index out of range");
  const Matrix z = normalizer_.normalize_inputs(states, actions);
  const Matrix out = nn::mlp_forward_batch(members_[static_cast<std::size_t>(member)], z);
  return states + normalizer_.denormalize_deltas(out);
}

void DynamicsEnsemble::set_normalizer(Normalizer n) {
  require(n.input_dim() == normalizer_.input_dim() && n.output_dim() == normalizer_.output_dim(),
          "normalizer dims changed");
  normalizer_ = std::move(n);
}

}  // namespace ptl::dynamics
