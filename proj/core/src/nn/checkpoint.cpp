#include "ptl/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "ptl/errors.hpp"

namespace ptl::io {

Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ArtifactError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ArtifactError("expected a JSON array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw ArtifactError("ragged matrix in JSON");
    m.row(static_cast<Eigen::Index>(r)) = vector_from_json(j[r]).transpose();
  }
  return m;
}

Json mlp_to_json(const nn::MlpParams& p) {
  Json j;
  j["version"] = 1;
  j["layer_dims"] = p.layer_dims;
  Json weights = Json::array();
  Json biases = Json::array();
  for (int k = 0; k < nn::kLayerCount; ++k) {
    // One flat row-major array per layer.
    Json flat = Json::array();
    for (Eigen::Index r = 0; r < p.weights[k].rows(); ++r)
      for (Eigen::Index c = 0; c < p.weights[k].cols(); ++c) flat.push_back(p.weights[k](r, c));
    weights.push_back(std::move(flat));
    biases.push_back(vector_to_json(p.biases[k]));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

nn::MlpParams mlp_from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw ArtifactError("unsupported checkpoint version");
    const auto dims_list = j.at("layer_dims").get<std::vector<int>>();
    if (dims_list.size() != 4) throw ArtifactError("layer_dims must have 4 entries");
    nn::LayerDims dims{dims_list[0], dims_list[1], dims_list[2], dims_list[3]};
    nn::MlpParams p = nn::MlpParams::zeros(dims);
    const Json& weights = j.at("weights");
    const Json& biases = j.at("biases");
    if (weights.size() != 3 || biases.size() != 3) throw ArtifactError("expected 3 layers");
    for (int k = 0; k < nn::kLayerCount; ++k) {
      const Json& flat = weights[static_cast<std::size_t>(k)];
      if (flat.size() != static_cast<std::size_t>(p.weights[k].size()))
        throw ArtifactError("weight count mismatch in layer " + std::to_string(k));
      std::size_t idx = 0;
      for (Eigen::Index r = 0; r < p.weights[k].rows(); ++r)
        for (Eigen::Index c = 0; c < p.weights[k].cols(); ++c) p.weights[k](r, c) = flat[idx++].get<double>();
      p.biases[k] = vector_from_json(biases[static_cast<std::size_t>(k)]);
    }
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed network checkpoint: ") + e.what());
  } catch (const RejectedInput& e) {
    throw ArtifactError(std::string("invalid network checkpoint: ") + e.what());
  }
}

Json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ArtifactError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << text;
}

}  // namespace ptl::io

namespace ptl::nn {

std::string mlp_to_json(const MlpParams& params) { return io::mlp_to_json(params).dump(); }

MlpParams mlp_from_json(std::string_view text) {
  try {
    return io::mlp_from_json(io::Json::parse(text));
  } catch (const io::Json::parse_error& e) {
    throw ArtifactError(std::string("cannot parse network checkpoint: ") + e.what());
  }
}

void save_mlp(const MlpParams& params, const std::filesystem::path& path) {
  io::write_file(path, mlp_to_json(params) + "\n");
}

MlpParams load_mlp(const std::filesystem::path& path) {
  return io::mlp_from_json(io::parse_file(path));
}

}  // namespace ptl::nn
