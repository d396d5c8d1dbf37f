#include "ptl/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ptl/errors.hpp"

namespace ptl::envs {
namespace {

constexpr double kReferenceRadius = 0.3;
constexpr double kOrbitDropPenalty = 500.0;
constexpr double kOrbitDistanceWeight = 5.0;
constexpr double kSpinDropPenalty = 100.0;
constexpr double kSpinAngleWeight = 7.0;

// orbit2 layout
constexpr int kQ = 0;
constexpr int kPos = 4;
constexpr int kVel = 8;

Eigen::Vector2d pos(const Vector& s, int i) { return s.segment<2>(kPos + 2 * i); }
Eigen::Vector2d vel(const Vector& s, int i) { return s.segment<2>(kVel + 2 * i); }

bool outside_palm(const EnvParams& p, const Eigen::Vector2d& x) { return x.norm() > p.palm_radius; }

void collide(const EnvParams& p, Vector& s) {
  const Eigen::Vector2d p1 = pos(s, 0), p2 = pos(s, 1);
  const Eigen::Vector2d d = p2 - p1;
  const double dist = d.norm();
  if (dist >= p.object_radius[0] + p.object_radius[1] || dist == 0.0) return;
  const Eigen::Vector2d n = d / dist;
  const Eigen::Vector2d v1 = vel(s, 0), v2 = vel(s, 1);
  const double vn = (v2 - v1).dot(n);
  if (vn >= 0.0) return;  // separating
  const double inv1 = 1.0 / p.object_mass[0];
  const double inv2 = 1.0 / p.object_mass[1];
  const double j = -(1.0 + p.restitution) * vn / (inv1 + inv2);
  s.segment<2>(kVel) = v1 - j * inv1 * n;
  s.segment<2>(kVel + 2) = v2 + j * inv2 * n;
}

Vector orbit2_update(const Vector& state, const Vector& a, const EnvParams& p) {
  Vector s = state;
  s.segment<4>(kQ) += p.actuator_rate * (a - s.segment<4>(kQ));
  const double h = p.dt / static_cast<double>(p.substeps);
  for (int sub = 0; sub < p.substeps; ++sub) {
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector2d x = pos(s, i);
      const Eigen::Vector2d v = vel(s, i);
      Eigen::Vector2d acc = -p.damping * v;
      if (!outside_palm(p, x)) {
        const double r = x.norm();
        const Eigen::Vector2d radial = r > 1e-9 ? Eigen::Vector2d(x / r) : Eigen::Vector2d(1.0, 0.0);
        const Eigen::Vector2d tangential(-radial.y(), radial.x());
        const double force_scale = p.actuator_gain * p.object_radius[i];
        const Eigen::Vector2d force =
            force_scale * (s[kQ + 2 * i] * radial + s[kQ + 2 * i + 1] * tangential);
        acc += force / p.object_mass[i] - p.bowl_stiffness * x;
      }
      const Eigen::Vector2d v_next = v + h * acc;
      s.segment<2>(kVel + 2 * i) = v_next;
      s.segment<2>(kPos + 2 * i) = x + h * v_next;
    }
    collide(p, s);
  }
  return s;
}

Vector spinner_update(const Vector& state, const Vector& a, const EnvParams& p) {
  Vector s = state;
  s.head<2>() += p.actuator_rate * (a - s.head<2>());
  const double torque = p.actuator_gain * p.object_radius[0] * (s[0] - s[1]);
  const double h = p.dt / static_cast<double>(p.substeps);
  for (int sub = 0; sub < p.substeps; ++sub) {
    const double alpha = torque / p.inertia - p.damping * s[3];
    s[3] += h * alpha;
    s[2] += h * s[3];
  }
  return s;
}

}  // namespace

std::string to_string(EnvKind kind) { return kind == EnvKind::kOrbit2 ? "orbit2" : "spinner"; }

EnvKind env_kind_from_string(const std::string& s) {
  if (s == "orbit2") return EnvKind::kOrbit2;
  if (s == "spinner") return EnvKind::kSpinner;
  throw RejectedInput("unknown env kind '" + s + "'");
}

void EnvParams::validate() const {
  const int objects = kind == EnvKind::kOrbit2 ? 2 : 1;
  for (int i = 0; i < objects; ++i) {
    require(object_radius[i] > 0.0, "object_radius must be positive");
    require(object_mass[i] > 0.0, "object_mass must be positive");
  }
  require(inertia > 0.0, "inertia must be positive");
  require(palm_radius > 0.0, "palm_radius must be positive");
  require(dt > 0.0 && dt <= 0.1, "dt must lie in (0, 0.1]");
  require(actuator_count == action_dim(kind), "actuator_count does not match env kind");
  require(substeps >= 1, "substeps must be >= 1");
  require(actuator_gain > 0.0, "actuator_gain must be positive");
  require(actuator_rate > 0.0 && actuator_rate <= 1.0, "actuator_rate must lie in (0, 1]");
  require(damping >= 0.0, "damping must be non-negative");
  require(bowl_stiffness >= 0.0, "bowl_stiffness must be non-negative");
  require(restitution >= 0.0 && restitution <= 1.0, "restitution must lie in [0, 1]");
  require(target_orbit_radius > 0.0 && target_orbit_radius < palm_radius,
          "target_orbit_radius must lie inside the palm");
  require(max_spin > 0.0, "max_spin must be positive");
  require(reset_jitter >= 0.0 && reset_jitter < 0.5, "reset_jitter must lie in [0, 0.5)");
}

EnvParams orbit2_params(double radius_a, double radius_b) {
  EnvParams p;
  p.kind = EnvKind::kOrbit2;
  p.actuator_count = 4;
  p.object_radius = {radius_a, radius_b};
  const double density = 1.0 / (std::numbers::pi * kReferenceRadius * kReferenceRadius);
  p.object_mass = {density * std::numbers::pi * radius_a * radius_a,
                   density * std::numbers::pi * radius_b * radius_b};
  return p;
}

EnvParams spinner_params(double size) {
  EnvParams p;
  p.kind = EnvKind::kSpinner;
  p.actuator_count = 2;
  p.object_radius = {size, size};
  p.object_mass = {1.0, 1.0};
  p.inertia = size * size / 6.0;  // unit-mass cube about its axis
  p.actuator_gain = 1.0;
  p.bowl_stiffness = 0.0;
  p.damping = 1.0;
  return p;
}

int state_dim(EnvKind kind) { return kind == EnvKind::kOrbit2 ? 12 : 4; }
int action_dim(EnvKind kind) { return kind == EnvKind::kOrbit2 ? 4 : 2; }

std::vector<int> agent_state_indices(EnvKind kind) {
  if (kind == EnvKind::kOrbit2) return {0, 1, 2, 3};
  return {0, 1};
}

Vector orbit2_targets(const EnvParams& params, int step) {
  const double theta = params.target_rate * params.dt * static_cast<double>(step);
  const Eigen::Vector2d t1 = params.target_orbit_radius * Eigen::Vector2d(std::cos(theta), std::sin(theta));
  Vector out(4);
  out << t1, -t1;
  return out;
}

EnvState env_reset(const EnvParams& params, nn::RngStream& rng) {
  params.validate();
  EnvState st;
  st.values = Vector::Zero(state_dim(params.kind));
  const double jitter = params.reset_jitter * params.palm_radius;
  auto draw = [&] { return jitter > 0.0 ? rng.uniform(-jitter, jitter) : 0.0; };
  if (params.kind == EnvKind::kOrbit2) {
    st.values.segment<4>(kPos) = orbit2_targets(params, 0);
    for (int i = 0; i < 4; ++i) st.values[kPos + i] += draw();
  } else {
    st.values[2] = draw();
  }
  return st;
}

Vector true_dynamics(const Vector& state, const Vector& action, const EnvParams& params) {
  require(state.size() == state_dim(params.kind), "state has the wrong dimension");
  require(action.size() == params.actuator_count, "action length != actuator_count");
  const Vector a = action.cwiseMax(-1.0).cwiseMin(1.0);
  Vector next = params.kind == EnvKind::kOrbit2 ? orbit2_update(state, a, params)
                                                : spinner_update(state, a, params);
  if (!next.allFinite()) throw SimulationDiverged("environment state became non-finite");
  return next;
}

bool is_dropped(const EnvParams& params, const Vector& state) {
  if (params.kind == EnvKind::kOrbit2)
    return outside_palm(params, pos(state, 0)) || outside_palm(params, pos(state, 1));
  return std::abs(state[3]) > params.max_spin;
}

double env_score(const EnvParams& params, const Vector& state, int step) {
  if (params.kind == EnvKind::kOrbit2)
    return -(state.segment<4>(kPos) - orbit2_targets(params, step)).norm();
  return -std::abs(state[2] - params.goal_angle);
}

double env_reward(const EnvParams& params, const Vector& state, int step) {
  const double distance = -env_score(params, state, step);
  const bool dropped = is_dropped(params, state);
  if (params.kind == EnvKind::kOrbit2)
    return -kOrbitDistanceWeight * distance - (dropped ? kOrbitDropPenalty : 0.0);
  return -kSpinAngleWeight * distance - (dropped ? kSpinDropPenalty : 0.0);
}

StepResult env_step(const EnvState& state, const Vector& action, const EnvParams& params) {
  StepResult r;
  r.next.values = true_dynamics(state.values, action, params);
  r.next.step = state.step + 1;
  r.score = env_score(params, r.next.values, r.next.step);
  r.reward = env_reward(params, r.next.values, r.next.step);
  r.flags.dropped = is_dropped(params, r.next.values);
  return r;
}

double orbit2_kinetic_energy(const EnvParams& params, const Vector& state) {
  return 0.5 * params.object_mass[0] * vel(state, 0).squaredNorm() +
         0.5 * params.object_mass[1] * vel(state, 1).squaredNorm();
}

RewardFn make_reward_fn(const EnvParams& params) {
  return [params](const Vector& next_state, const Vector&, int next_step) {
    return env_reward(params, next_state, next_step);
  };
}

TrueDynamicsModel::TrueDynamicsModel(EnvParams params) : params_(std::move(params)) {
  params_.validate();
}

int TrueDynamicsModel::state_dim() const { return envs::state_dim(params_.kind); }
int TrueDynamicsModel::action_dim() const { return params_.actuator_count; }

Matrix TrueDynamicsModel::predict_next_batch(int member, const Matrix& states,
                                             const Matrix& actions) const {
  require(member == 0, "true dynamics has a single member");
  require(states.cols() == actions.cols(), "batch sizes differ");
  Matrix out(states.rows(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c)
    out.col(c) = true_dynamics(states.col(c), actions.col(c), params_);
  return out;
}

}  // namespace ptl::envs
