#pragma once

#include "json_io.hpp"
#include "ptl/envs/env.hpp"

namespace ptl::io {

Json env_params_to_json(const envs::EnvParams& p);
/// Missing keys keep the defaults of `base`; unknown keys throw ConfigError naming the key.
envs::EnvParams env_params_from_json(const Json& j);
envs::EnvParams env_params_from_json(const Json& j, envs::EnvParams base, const std::string& where);

}  // namespace ptl::io
