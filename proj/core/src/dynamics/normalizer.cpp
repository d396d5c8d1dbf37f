#include "ptl/dynamics/normalizer.hpp"

#include "ptl/errors.hpp"

namespace ptl::dynamics {

Normalizer Normalizer::identity(int input_dim, int output_dim) {
  return {Vector::Zero(input_dim), Vector::Ones(input_dim), Vector::Zero(output_dim),
          Vector::Ones(output_dim)};
}

Normalizer Normalizer::fit(std::span<const Transition> data) {
  require(!data.empty(), "cannot fit a normalizer on an empty dataset");
  const Eigen::Index ds = data.front().state.size();
  const Eigen::Index da = data.front().action.size();
  Matrix inputs(ds + da, static_cast<Eigen::Index>(data.size()));
  Matrix deltas(ds, static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& tr = data[i];
    require(tr.state.size() == ds && tr.action.size() == da && tr.next_state.size() == ds,
            "inconsistent transition dimensions");
    const auto col = static_cast<Eigen::Index>(i);
    inputs.col(col).head(ds) = tr.state;
    inputs.col(col).tail(da) = tr.action;
    deltas.col(col) = tr.next_state - tr.state;
  }
  auto stats = [](const Matrix& m, Vector& mean, Vector& stddev) {
    mean = m.rowwise().mean();
    const Matrix centered = m.colwise() - mean;
    stddev = (centered.array().square().rowwise().sum() / static_cast<double>(m.cols())).sqrt();
    stddev = stddev.cwiseMax(kStdFloor);
  };
  Normalizer n;
  stats(inputs, n.input_mean, n.input_std);
  stats(deltas, n.output_mean, n.output_std);
  return n;
}

Matrix Normalizer::normalize_inputs(const Matrix& states, const Matrix& actions) const {
  require(states.rows() + actions.rows() == input_mean.size() && states.cols() == actions.cols(),
          "state/action shape does not match the normalizer");
  Matrix z(input_mean.size(), states.cols());
  z.topRows(states.rows()) = states;
  z.bottomRows(actions.rows()) = actions;
  z.colwise() -= input_mean;
  z.array().colwise() /= input_std.array();
  return z;
}

Matrix Normalizer::normalize_deltas(const Matrix& deltas) const {
  require(deltas.rows() == output_mean.size(), "delta shape does not match the normalizer");
  Matrix z = deltas.colwise() - output_mean;
  z.array().colwise() /= output_std.array();
  return z;
}

Matrix Normalizer::denormalize_deltas(const Matrix& normalized) const {
  require(normalized.rows() == output_mean.size(), "output shape does not match the normalizer");
  Matrix d = normalized.array().colwise() * output_std.array();
  d.colwise() += output_mean;
  return d;
}

}  // namespace ptl::dynamics
