#include "ptl/dynamics/checkpoint.hpp"

#include "json_io.hpp"
#include "ptl/errors.hpp"

namespace ptl::io {

Json normalizer_to_json(const dynamics::Normalizer& n) {
  return Json{{"input_mean", vector_to_json(n.input_mean)},
              {"input_std", vector_to_json(n.input_std)},
              {"output_mean", vector_to_json(n.output_mean)},
              {"output_std", vector_to_json(n.output_std)}};
}

dynamics::Normalizer normalizer_from_json(const Json& j) {
  try {
    return {vector_from_json(j.at("input_mean")), vector_from_json(j.at("input_std")),
            vector_from_json(j.at("output_mean")), vector_from_json(j.at("output_std"))};
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed normalizer: ") + e.what());
  }
}

}  // namespace ptl::io

namespace ptl::dynamics {
namespace {

using io::Json;

Json progressive_json(const ProgressiveModel& pm) {
  Json lw = Json::array();
  for (const auto& m : pm.lateral_weights) lw.push_back(io::matrix_to_json(m));
  return Json{{"version", 1},
              {"wiring_mode", to_string(pm.wiring)},
              {"source_column", io::mlp_to_json(pm.source_column)},
              {"target_column", io::mlp_to_json(pm.target_column)},
              {"lateral_weights", std::move(lw)},
              {"lateral_scales", pm.lateral_scales},
              {"lateral_frozen", pm.lateral_frozen},
              {"normalizer", io::normalizer_to_json(pm.normalizer)},
              {"source_normalizer", io::normalizer_to_json(pm.source_normalizer)}};
}

ProgressiveModel progressive_parse(const Json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw ArtifactError("unsupported checkpoint version");
    ProgressiveModel pm;
    pm.wiring = wiring_from_string(j.at("wiring_mode").get<std::string>());
    pm.source_column = io::mlp_from_json(j.at("source_column"));
    pm.target_column = io::mlp_from_json(j.at("target_column"));
    const Json& lw = j.at("lateral_weights");
    const Json& ls = j.at("lateral_scales");
    if (lw.size() != 2 || ls.size() != 2) throw ArtifactError("expected two lateral connections");
    for (std::size_t k = 0; k < 2; ++k) {
      pm.lateral_weights[k] = io::matrix_from_json(lw[k]);
      pm.lateral_scales[k] = ls[k].get<double>();
    }
    pm.lateral_frozen = j.value("lateral_frozen", false);
    pm.normalizer = io::normalizer_from_json(j.at("normalizer"));
    pm.source_normalizer =
        j.contains("source_normalizer") ? io::normalizer_from_json(j.at("source_normalizer")) : pm.normalizer;
    pm.validate();
    return pm;
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed progressive checkpoint: ") + e.what());
  } catch (const RejectedInput& e) {
    throw ArtifactError(std::string("invalid progressive checkpoint: ") + e.what());
  }
}

Json ensemble_json(const DynamicsEnsemble& e) {
  Json members = Json::array();
  for (const auto& m : e.members()) members.push_back(io::mlp_to_json(m));
  return Json{{"version", 1}, {"kind", "ensemble"}, {"members", std::move(members)},
              {"normalizer", io::normalizer_to_json(e.normalizer())}};
}

Json ensemble_json(const ProgressiveEnsemble& e) {
  Json members = Json::array();
  for (const auto& m : e.members()) members.push_back(progressive_json(m));
  return Json{{"version", 1}, {"kind", "progressive_ensemble"}, {"members", std::move(members)}};
}

AnyModel parse_model(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ensemble") {
      std::vector<nn::MlpParams> members;
      for (const auto& m : j.at("members")) members.push_back(io::mlp_from_json(m));
      return DynamicsEnsemble(std::move(members), io::normalizer_from_json(j.at("normalizer")));
    }
    if (kind == "progressive_ensemble") {
      std::vector<ProgressiveModel> members;
      for (const auto& m : j.at("members")) members.push_back(progressive_parse(m));
      return ProgressiveEnsemble(std::move(members));
    }
    throw ArtifactError("unknown model kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed model checkpoint: ") + e.what());
  } catch (const RejectedInput& e) {
    throw ArtifactError(std::string("invalid model checkpoint: ") + e.what());
  }
}

}  // namespace

std::string progressive_to_json(const ProgressiveModel& pm) { return progressive_json(pm).dump(); }

ProgressiveModel progressive_from_json(std::string_view text) {
  try {
    return progressive_parse(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw ArtifactError(std::string("cannot parse progressive checkpoint: ") + e.what());
  }
}

std::string ensemble_to_json(const DynamicsEnsemble& e) { return ensemble_json(e).dump(); }
std::string ensemble_to_json(const ProgressiveEnsemble& e) { return ensemble_json(e).dump(); }

void save_model(const DynamicsEnsemble& e, const std::filesystem::path& path) {
  io::write_file(path, ensemble_to_json(e) + "\n");
}

void save_model(const ProgressiveEnsemble& e, const std::filesystem::path& path) {
  io::write_file(path, ensemble_to_json(e) + "\n");
}

AnyModel load_model(const std::filesystem::path& path) { return parse_model(io::parse_file(path)); }

DynamicsEnsemble load_ensemble(const std::filesystem::path& path) {
  AnyModel m = load_model(path);
  if (auto* e = std::get_if<DynamicsEnsemble>(&m)) return std::move(*e);
  throw ArtifactError(path.string() + " does not hold a plain dynamics ensemble");
}

const DynamicsModel& as_model(const AnyModel& m) {
  return std::visit([](const auto& v) -> const DynamicsModel& { return v; }, m);
}

}  // namespace ptl::dynamics
