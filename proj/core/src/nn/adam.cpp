#include "ptl/nn/adam.hpp"

#include <cmath>

#include "ptl/errors.hpp"

namespace ptl::nn {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, OptimizerState& state,
               const AdamConfig& cfg) {
  require(params.size() == grads.size(), "parameter and gradient tensor counts differ");
  require(cfg.lr > 0.0, "learning rate must be positive");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].size() == grads[i].size(), "parameter and gradient sizes differ");
    for (double g : grads[i])
      if (!std::isfinite(g)) throw TrainingDiverged("non-finite gradient");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  require(state.first_moment.size() == params.size(), "optimizer state does not match parameters");

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    require(m.size() == params[i].size(), "optimizer state does not match parameters");
    for (std::size_t j = 0; j < params[i].size(); ++j) {
      const double g = grads[i][j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      params[i][j] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace ptl::nn
