#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ptl/dynamics/model.hpp"
#include "ptl/nn/rng.hpp"
#include "ptl/types.hpp"

namespace ptl::envs {

/// orbit2: two discs on a concave palm disc, pushed by four lagged actuators
///         (radial + tangential force per disc), elastic disc-disc contact.
///         State (12): [q0..q3, p1x, p1y, p2x, p2y, v1x, v1y, v2x, v2y].
/// spinner: 1-DoF rotor driven by an antagonistic pair of lagged torque actuators.
///         State (4): [q0, q1, angle, angular_velocity].
enum class EnvKind { kOrbit2, kSpinner };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& s);

struct EnvParams {
  EnvKind kind = EnvKind::kOrbit2;
  /// orbit2: radius of each disc [m]; spinner: characteristic size in [0].
  std::array<double, 2> object_radius{0.3, 0.3};
  /// orbit2: disc masses [kg]; spinner: rotor mass in [0].
  std::array<double, 2> object_mass{1.0, 1.0};
  /// spinner rotor inertia [kg m^2]; unused by orbit2.
  double inertia = 1.0 / 6.0;
  double palm_radius = 1.0;
  double dt = 0.1;
  int actuator_count = 4;
  int substeps = 10;

  /// Force (orbit2, per unit actuator and per unit object radius) or torque
  /// (spinner, per unit size) produced by a fully engaged actuator.
  double actuator_gain = 6.0;
  /// First-order actuator tracking: q <- q + rate * (a - q) each control step.
  double actuator_rate = 0.5;
  double damping = 0.5;         ///< velocity damping [1/s]
  double bowl_stiffness = 2.0;  ///< palm curvature restoring acceleration [1/s^2]
  double restitution = 0.9;

  double target_orbit_radius = 0.5;  ///< orbit2 target circle radius
  double target_rate = 1.0;          ///< orbit2 target angular velocity [rad/s]
  double goal_angle = 0.5;           ///< spinner goal pose [rad]
  double max_spin = 4.0;             ///< spinner drops when |omega| exceeds this [rad/s]
  double reset_jitter = 0.01;        ///< uniform reset jitter as a fraction of palm_radius

  /// Throws RejectedInput naming the offending field.
  void validate() const;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

/// Default orbit2 parameters for a pair of discs of the given radius; mass
/// scales with disc area so that a 0.3 m disc weighs 1 kg.
EnvParams orbit2_params(double radius_a, double radius_b);
EnvParams spinner_params(double size);

int state_dim(EnvKind kind);
int action_dim(EnvKind kind);
/// Indices of the actuator ("hand") coordinates within the state vector.
std::vector<int> agent_state_indices(EnvKind kind);

struct EnvState {
  Vector values;
  int step = 0;  ///< control step index; drives the orbit2 target schedule
};

struct StepFlags {
  bool dropped = false;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  double score = 0.0;
  StepFlags flags;
};

EnvState env_reset(const EnvParams& params, nn::RngStream& rng);

/// Advances one control step (dt) with `substeps` semi-implicit Euler
/// sub-steps. Action components are clamped to [-1, 1]. Reward and score are
/// evaluated on the next state. Throws SimulationDiverged on a non-finite state.
StepResult env_step(const EnvState& state, const Vector& action, const EnvParams& params);

/// State update of env_step without reward evaluation.
Vector true_dynamics(const Vector& state, const Vector& action, const EnvParams& params);

/// orbit2 targets at control step `step`: [t1x, t1y, t2x, t2y].
Vector orbit2_targets(const EnvParams& params, int step);

bool is_dropped(const EnvParams& params, const Vector& state);
double env_score(const EnvParams& params, const Vector& state, int step);
double env_reward(const EnvParams& params, const Vector& state, int step);

/// Total kinetic energy of the two orbit2 discs.
double orbit2_kinetic_energy(const EnvParams& params, const Vector& state);

/// Reward of reaching `next_state` at control step `next_step` via `action`.
using RewardFn = std::function<double(const Vector& next_state, const Vector& action, int next_step)>;
RewardFn make_reward_fn(const EnvParams& params);

/// Ground-truth dynamics exposed through the learned-model interface.
class TrueDynamicsModel final : public dynamics::DynamicsModel {
 public:
  explicit TrueDynamicsModel(EnvParams params);
  int member_count() const override { return 1; }
  int state_dim() const override;
  int action_dim() const override;
  Matrix predict_next_batch(int member, const Matrix& states, const Matrix& actions) const override;

 private:
  EnvParams params_;
};

}  // namespace ptl::envs
