#pragma once

#include <span>

#include "ptl/dynamics/transition.hpp"
#include "ptl/types.hpp"

namespace ptl::dynamics {

inline constexpr double kStdFloor = 1e-8;

/// Z-score statistics over the concatenated (state, action) input and over the
/// state delta s' - s.
struct Normalizer {
  Vector input_mean;
  Vector input_std;
  Vector output_mean;
  Vector output_std;

  static Normalizer identity(int input_dim, int output_dim);
  /// Population statistics of `data`; std entries are floored at kStdFloor.
  static Normalizer fit(std::span<const Transition> data);

  int input_dim() const { return static_cast<int>(input_mean.size()); }
  int output_dim() const { return static_cast<int>(output_mean.size()); }

  /// Columns of `states` and `actions` are samples; returns normalized concat(s, a).
  Matrix normalize_inputs(const Matrix& states, const Matrix& actions) const;
  Matrix normalize_deltas(const Matrix& deltas) const;
  Matrix denormalize_deltas(const Matrix& normalized) const;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

}  // namespace ptl::dynamics
