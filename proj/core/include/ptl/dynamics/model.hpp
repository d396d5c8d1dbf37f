#pragma once

#include <vector>

#include "ptl/types.hpp"

namespace ptl::dynamics {

/// Anything the planner can roll out: an ensemble of one-step predictors
/// s_{t+1} = s_t + f(s_t, a_t). Implementations are immutable during evaluation
/// and safe to share across threads.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int member_count() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;

  /// Next states predicted by one member; columns of `states`/`actions` are samples.
  virtual Matrix predict_next_batch(int member, const Matrix& states,
                                    const Matrix& actions) const = 0;
};

/// Per-member next-state predictions for a single (state, action) pair.
/// Throws ModelDiverged if any prediction is non-finite.
std::vector<Vector> predict_next_state(const DynamicsModel& model, const Vector& state,
                                       const Vector& action);

}  // namespace ptl::dynamics
