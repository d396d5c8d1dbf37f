#include "ptl/dynamics/progressive.hpp"

#include <cmath>

#include "ptl/errors.hpp"

namespace ptl::dynamics {

std::string to_string(Wiring w) { return w == Wiring::kPtl ? "PTL" : "PNN_OUT"; }

Wiring wiring_from_string(const std::string& s) {
  if (s == "PTL") return Wiring::kPtl;
  if (s == "PNN_OUT") return Wiring::kPnnOut;
  throw RejectedInput("unknown wiring mode '" + s + "'");
}

void ProgressiveModel::validate() const {
  source_column.validate();
  target_column.validate();
  require(source_column.layer_dims == target_column.layer_dims,
          "source and target columns must have identical layer_dims");
  const auto& dims = target_column.layer_dims;
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    const int recv = receiving_layer(k);
    require(lateral_weights[k].rows() == dims[recv + 1] && lateral_weights[k].cols() == dims[k + 1],
            "lateral weight " + std::to_string(k) + " has the wrong shape");
    require(lateral_weights[k].allFinite() && std::isfinite(lateral_scales[k]),
            "lateral parameters must be finite");
  }
  require(normalizer.input_dim() == dims[0] && normalizer.output_dim() == dims[3],
          "normalizer does not match column dims");
  require(source_normalizer.input_dim() == dims[0], "source normalizer does not match column dims");
}

Matrix source_column_inputs(const ProgressiveModel& pm, const Matrix& z_inputs) {
  const Normalizer& t = pm.normalizer;
  const Normalizer& s = pm.source_normalizer;
  if (t.input_mean == s.input_mean && t.input_std == s.input_std) return z_inputs;
  const Eigen::ArrayXXd raw = (z_inputs.array().colwise() * t.input_std.array()).colwise() + t.input_mean.array();
  return ((raw.colwise() - s.input_mean.array()).colwise() / s.input_std.array()).matrix();
}

ProgressiveTrace progressive_trace(const ProgressiveModel& pm, const Matrix& z_inputs,
                                   const nn::MlpTrace* source) {
  ProgressiveTrace t;
  t.source = source != nullptr ? *source
                               : nn::mlp_forward_trace(pm.source_column, source_column_inputs(pm, z_inputs));
  const auto& dims = pm.target_column.layer_dims;
  for (int layer = 0; layer < nn::kLayerCount; ++layer)
    t.injected[layer] = Matrix::Zero(dims[layer + 1], z_inputs.cols());
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    t.lateral[k] = (pm.lateral_scales[k] * t.source.hidden[k]).cwiseMax(0.0);
    t.injected[pm.receiving_layer(k)] += pm.lateral_weights[k] * t.lateral[k];
  }
  const nn::LayerInjections inject{&t.injected[0], &t.injected[1], &t.injected[2]};
  t.target = nn::mlp_forward_trace(pm.target_column, z_inputs, inject);
  return t;
}

Matrix progressive_forward_batch(const ProgressiveModel& pm, const Matrix& states,
                                 const Matrix& actions) {
  require(states.rows() == pm.state_dim() && actions.rows() == pm.action_dim(),
          "state/action dims do not match the progressive model");
  const Matrix z = pm.normalizer.normalize_inputs(states, actions);
  const ProgressiveTrace t = progressive_trace(pm, z);
  return pm.normalizer.denormalize_deltas(t.target.output);
}

Vector progressive_forward(const ProgressiveModel& pm, const Vector& state, const Vector& action) {
  return progressive_forward_batch(pm, state, action);
}

ProgressiveModel init_progressive_from_source(const DynamicsEnsemble& source, int member_index,
                                              Wiring wiring, nn::RngStream& rng,
                                              LateralInit lateral) {
  require(member_index >= 0 && member_index < source.member_count(),
          "source member index out of range");
  ProgressiveModel pm;
  pm.wiring = wiring;
  pm.source_column = source.members()[static_cast<std::size_t>(member_index)];
  const auto dims = pm.source_column.layer_dims;
  pm.target_column = nn::MlpParams::random(dims, rng);
  pm.normalizer = source.normalizer();
  pm.source_normalizer = source.normalizer();
  pm.lateral_frozen = lateral == LateralInit::kZeroFrozen;
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    const int rows = dims[pm.receiving_layer(k) + 1];
    const int cols = dims[k + 1];
    pm.lateral_weights[k] = Matrix::Zero(rows, cols);
    if (lateral == LateralInit::kRandom) {
      const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) pm.lateral_weights[k](r, c) = rng.uniform(-bound, bound);
    }
  }
  for (int k = 0; k < nn::kHiddenCount; ++k)
    pm.lateral_scales[k] = lateral == LateralInit::kRandom ? rng.uniform(0.5, 1.5) : 0.0;
  return pm;
}

ProgressiveEnsemble::ProgressiveEnsemble(std::vector<ProgressiveModel> members)
    : members_(std::move(members)) {
  require(!members_.empty(), "a progressive ensemble needs at least one member");
  for (const auto& m : members_) m.validate();
}

ProgressiveEnsemble ProgressiveEnsemble::from_source(const DynamicsEnsemble& source, Wiring wiring,
                                                     nn::RngStream& rng, LateralInit lateral) {
  std::vector<ProgressiveModel> members;
  for (int m = 0; m < source.member_count(); ++m) {
    nn::RngStream child = rng.fork(static_cast<std::uint64_t>(m));
    members.push_back(init_progressive_from_source(source, m, wiring, child, lateral));
  }
  return ProgressiveEnsemble(std::move(members));
}

Matrix ProgressiveEnsemble::predict_next_batch(int member, const Matrix& states,
                                               const Matrix& actions) const {
  require(member >= 0 && member < member_count(), "ensemble member index out of range");
  return states + progressive_forward_batch(members_[static_cast<std::size_t>(member)], states, actions);
}

}  // namespace ptl::dynamics
