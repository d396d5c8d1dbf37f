#pragma once

#include "ptl/types.hpp"

namespace ptl::dynamics {

/// One (s_t, a_t, r_t, s_{t+1}) quadruple.
struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
};

}  // namespace ptl::dynamics
