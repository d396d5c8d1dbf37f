#include <set>

#include "ptl/errors.hpp"
#include "store_json.hpp"

namespace ptl::io {
namespace {

const std::set<std::string>& env_keys() {
  static const std::set<std::string> keys{
      "kind", "object_radius", "object_mass", "inertia", "palm_radius", "dt",
      "actuator_count", "substeps", "actuator_gain", "actuator_rate", "damping",
      "bowl_stiffness", "restitution", "target_orbit_radius", "target_rate", "goal_angle",
      "max_spin", "reset_jitter"};
  return keys;
}

std::array<double, 2> pair_from(const Json& v) {
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  const auto list = v.get<std::vector<double>>();
  if (list.size() == 1) return {list[0], list[0]};
  if (list.size() != 2) throw ConfigError("expected one or two values");
  return {list[0], list[1]};
}

}  // namespace

Json env_params_to_json(const envs::EnvParams& p) {
  return Json{{"kind", envs::to_string(p.kind)},
              {"object_radius", p.object_radius},
              {"object_mass", p.object_mass},
              {"inertia", p.inertia},
              {"palm_radius", p.palm_radius},
              {"dt", p.dt},
              {"actuator_count", p.actuator_count},
              {"substeps", p.substeps},
              {"actuator_gain", p.actuator_gain},
              {"actuator_rate", p.actuator_rate},
              {"damping", p.damping},
              {"bowl_stiffness", p.bowl_stiffness},
              {"restitution", p.restitution},
              {"target_orbit_radius", p.target_orbit_radius},
              {"target_rate", p.target_rate},
              {"goal_angle", p.goal_angle},
              {"max_spin", p.max_spin},
              {"reset_jitter", p.reset_jitter}};
}

envs::EnvParams env_params_from_json(const Json& j, envs::EnvParams base, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!env_keys().contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
  try {
    envs::EnvParams p = base;
    if (j.contains("kind")) {
      const auto kind = envs::env_kind_from_string(j.at("kind").get<std::string>());
      if (kind != p.kind) p = kind == envs::EnvKind::kOrbit2 ? envs::orbit2_params(0.3, 0.3)
                                                             : envs::spinner_params(1.0);
    }
    if (j.contains("object_radius")) {
      const auto r = pair_from(j.at("object_radius"));
      // Derived quantities follow the new size unless given explicitly.
      const envs::EnvParams sized = p.kind == envs::EnvKind::kOrbit2 ? envs::orbit2_params(r[0], r[1])
                                                                     : envs::spinner_params(r[0]);
      p.object_radius = sized.object_radius;
      p.object_mass = sized.object_mass;
      p.inertia = sized.inertia;
    }
    if (j.contains("object_mass")) p.object_mass = pair_from(j.at("object_mass"));
    auto num = [&](const char* key, double& field) {
      if (j.contains(key)) field = j.at(key).get<double>();
    };
    num("inertia", p.inertia);
    num("palm_radius", p.palm_radius);
    num("dt", p.dt);
    if (j.contains("actuator_count")) p.actuator_count = j.at("actuator_count").get<int>();
    if (j.contains("substeps")) p.substeps = j.at("substeps").get<int>();
    num("actuator_gain", p.actuator_gain);
    num("actuator_rate", p.actuator_rate);
    num("damping", p.damping);
    num("bowl_stiffness", p.bowl_stiffness);
    num("restitution", p.restitution);
    num("target_orbit_radius", p.target_orbit_radius);
    num("target_rate", p.target_rate);
    num("goal_angle", p.goal_angle);
    num("max_spin", p.max_spin);
    num("reset_jitter", p.reset_jitter);
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const RejectedInput& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

envs::EnvParams env_params_from_json(const Json& j) {
  try {
    const auto kind = envs::env_kind_from_string(j.at("kind").get<std::string>());
    const envs::EnvParams base =
        kind == envs::EnvKind::kOrbit2 ? envs::orbit2_params(0.3, 0.3) : envs::spinner_params(1.0);
    return env_params_from_json(j, base, "env_params");
  } catch (const ConfigError& e) {
    throw ArtifactError(e.what());
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed env_params: ") + e.what());
  } catch (const RejectedInput& e) {
    throw ArtifactError(std::string("invalid env_params: ") + e.what());
  }
}

}  // namespace ptl::io
