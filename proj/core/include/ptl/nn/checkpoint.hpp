#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ptl/nn/mlp.hpp"

namespace ptl::nn {

/// {"version":1, "layer_dims":[...], "weights":[[row-major]], "biases":[[...]]}.
/// Doubles are written in shortest round-trip form, so load(save(p)) == p exactly.
std::string mlp_to_json(const MlpParams& params);
MlpParams mlp_from_json(std::string_view text);

void save_mlp(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_mlp(const std::filesystem::path& path);

}  // namespace ptl::nn
