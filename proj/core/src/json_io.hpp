#pragma once

// Private JSON helpers shared by the checkpoint, store and config code.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ptl/dynamics/normalizer.hpp"
#include "ptl/nn/mlp.hpp"
#include "ptl/types.hpp"

namespace ptl::io {

using Json = nlohmann::json;

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
/// Row-major list of rows.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json mlp_to_json(const nn::MlpParams& p);
nn::MlpParams mlp_from_json(const Json& j);

Json normalizer_to_json(const dynamics::Normalizer& n);
dynamics::Normalizer normalizer_from_json(const Json& j);

Json parse_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ptl::io
