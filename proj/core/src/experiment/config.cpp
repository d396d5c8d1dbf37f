#include "ptl/experiment/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "ptl/errors.hpp"
#include "store_json.hpp"

namespace ptl::experiment {
namespace {

using io::Json;

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("section \"" + where + "\" must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" in section \"" + where + "\"");
}

template <typename T>
void read(const Json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("\"" + std::string(key) + "\" in section \"" + where + "\" has the wrong type");
  }
}

void check(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError("invalid \"" + field + "\": " + why);
}

std::string lateral_to_string(dynamics::LateralInit l) {
  return l == dynamics::LateralInit::kRandom ? "random" : "zero_frozen";
}

dynamics::LateralInit lateral_from_string(const std::string& s) {
  if (s == "random") return dynamics::LateralInit::kRandom;
  if (s == "zero_frozen") return dynamics::LateralInit::kZeroFrozen;
  throw ConfigError("invalid \"lateral_init\": expected random or zero_frozen");
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kSource: return "source";
    case Mode::kScratch: return "scratch";
    case Mode::kFinetune: return "finetune";
    case Mode::kFinetuneScratch: return "finetune_scratch";
    case Mode::kPnnOut: return "pnn_out";
    case Mode::kPtl: return "ptl";
  }
  return "ptl";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::kSource, Mode::kScratch, Mode::kFinetune, Mode::kFinetuneScratch,
                 Mode::kPnnOut, Mode::kPtl})
    if (to_string(m) == s) return m;
  throw ConfigError("invalid \"mode\": unknown mode '" + s + "'");
}

bool needs_source_model(Mode m) {
  return m == Mode::kFinetune || m == Mode::kFinetuneScratch || m == Mode::kPnnOut || m == Mode::kPtl;
}

bool uses_source_data(Mode m) { return m == Mode::kFinetune || m == Mode::kPnnOut || m == Mode::kPtl; }

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return a.hidden == b.hidden && a.ensemble_size == b.ensemble_size &&
         a.train.epochs == b.train.epochs && a.train.batch_size == b.train.batch_size &&
         a.train.adam.lr == b.train.adam.lr && a.train.adam.beta1 == b.train.adam.beta1 &&
         a.train.adam.beta2 == b.train.adam.beta2 && a.train.adam.epsilon == b.train.adam.epsilon &&
         a.lateral_init == b.lateral_init;
}

void RunConfig::validate() const {
  check(iterations >= 0, "iterations", "must be >= 0");
  check(rollouts_per_iter >= 1, "rollouts_per_iter", "must be >= 1");
  check(steps_per_rollout >= 1, "steps_per_rollout", "must be >= 1");
  check(random_rollouts >= 0, "random_rollouts", "must be >= 0");
  check(source_iterations >= 0, "source_iterations", "must be >= 0");
  check(selection.lambda1 >= 0.0 && selection.lambda1 <= 1.0, "lambda1", "must lie in [0, 1]");
  check(selection.rho >= 0.0 && selection.rho <= 1.0, "rho", "must lie in [0, 1]");
  check(selection.rho_number > 0.0 && selection.rho_number <= 1.0, "rho_number", "must lie in (0, 1]");
  check(selection.final_score_window >= 1, "final_score_window", "must be >= 1");
  check(eviction.fraction >= 0.0 && eviction.fraction <= 1.0, "eviction_fraction", "must lie in [0, 1]");
  check(planner.horizon >= 1, "horizon", "must be >= 1");
  check(planner.candidates >= 1, "candidates", "must be >= 1");
  check(planner.filter_beta > 0.0 && planner.filter_beta <= 1.0, "filter_beta", "must lie in (0, 1]");
  check(planner.reward_temperature > 0.0, "reward_temperature", "must be positive");
  check(planner.noise_sigma >= 0.0, "noise_sigma", "must be non-negative");
  check(planner.refinement_iters >= 1, "refinement_iters", "must be >= 1");
  check(model.hidden >= 1, "hidden", "must be >= 1");
  check(model.ensemble_size >= 1, "ensemble_size", "must be >= 1");
  check(model.train.epochs >= 0, "epochs", "must be >= 0");
  check(model.train.batch_size >= 1, "batch_size", "must be >= 1");
  check(model.train.adam.lr > 0.0, "learning_rate", "must be positive");
  check(!seeds.empty(), "seeds", "must list at least one seed");
  check(source_env.kind == target_env.kind, "env", "source and target must share a kind");
  try {
    source_env.validate();
    target_env.validate();
  } catch (const RejectedInput& e) {
    throw ConfigError(std::string("invalid env: ") + e.what());
  }
}

RunConfig parse_config(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  reject_unknown(doc, {"env", "model", "planner", "selection", "run"}, "<root>");
  RunConfig cfg;

  if (doc.contains("env")) {
    const Json& env = doc["env"];
    reject_unknown(env, {"kind", "source", "target"}, "env");
    std::string kind = "orbit2";
    read(env, "kind", kind, "env");
    envs::EnvKind k;
    try {
      k = envs::env_kind_from_string(kind);
    } catch (const RejectedInput&) {
      throw ConfigError("invalid \"kind\": unknown env kind '" + kind + "'");
    }
    if (k == envs::EnvKind::kSpinner) {
      cfg.source_env = envs::spinner_params(1.0);
      cfg.target_env = envs::spinner_params(0.6);
    }
    if (env.contains("source")) cfg.source_env = io::env_params_from_json(env["source"], cfg.source_env, "env.source");
    if (env.contains("target")) cfg.target_env = io::env_params_from_json(env["target"], cfg.target_env, "env.target");
  }

  if (doc.contains("model")) {
    const Json& m = doc["model"];
    reject_unknown(m, {"hidden", "ensemble_size", "epochs", "batch_size", "learning_rate", "lateral_init"}, "model");
    read(m, "hidden", cfg.model.hidden, "model");
    read(m, "ensemble_size", cfg.model.ensemble_size, "model");
    read(m, "epochs", cfg.model.train.epochs, "model");
    read(m, "batch_size", cfg.model.train.batch_size, "model");
    read(m, "learning_rate", cfg.model.train.adam.lr, "model");
    if (m.contains("lateral_init")) {
      std::string s;
      read(m, "lateral_init", s, "model");
      cfg.model.lateral_init = lateral_from_string(s);
    }
  }

  if (doc.contains("planner")) {
    const Json& p = doc["planner"];
    reject_unknown(p, {"horizon", "candidates", "filter_beta", "reward_temperature", "noise_sigma", "refinement_iters"}, "planner");
    read(p, "horizon", cfg.planner.horizon, "planner");
    read(p, "candidates", cfg.planner.candidates, "planner");
    read(p, "filter_beta", cfg.planner.filter_beta, "planner");
    read(p, "reward_temperature", cfg.planner.reward_temperature, "planner");
    read(p, "noise_sigma", cfg.planner.noise_sigma, "planner");
    read(p, "refinement_iters", cfg.planner.refinement_iters, "planner");
  }

  if (doc.contains("selection")) {
    const Json& s = doc["selection"];
    reject_unknown(s, {"lambda1", "rho", "rho_number", "final_score_window", "strategy", "eviction_fraction"}, "selection");
    read(s, "lambda1", cfg.selection.lambda1, "selection");
    read(s, "rho", cfg.selection.rho, "selection");
    read(s, "rho_number", cfg.selection.rho_number, "selection");
    read(s, "final_score_window", cfg.selection.final_score_window, "selection");
    read(s, "eviction_fraction", cfg.eviction.fraction, "selection");
    if (s.contains("strategy")) {
      std::string name;
      read(s, "strategy", name, "selection");
      try {
        cfg.selection.strategy = replay::selection_strategy_from_string(name);
      } catch (const RejectedInput&) {
        throw ConfigError("invalid \"strategy\": unknown selection strategy '" + name + "'");
      }
    }
  }

  if (doc.contains("run")) {
    const Json& r = doc["run"];
    reject_unknown(r, {"mode", "iterations", "rollouts_per_iter", "steps_per_rollout", "random_rollouts",
                       "source_iterations", "seeds", "reward_threshold", "score_threshold"}, "run");
    if (r.contains("mode")) {
      std::string name;
      read(r, "mode", name, "run");
      cfg.mode = mode_from_string(name);
    }
    read(r, "iterations", cfg.iterations, "run");
    read(r, "rollouts_per_iter", cfg.rollouts_per_iter, "run");
    read(r, "steps_per_rollout", cfg.steps_per_rollout, "run");
    read(r, "random_rollouts", cfg.random_rollouts, "run");
    read(r, "source_iterations", cfg.source_iterations, "run");
    read(r, "seeds", cfg.seeds, "run");
    read(r, "reward_threshold", cfg.reward_threshold, "run");
    read(r, "score_threshold", cfg.score_threshold, "run");
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  Json doc;
  doc["env"] = {{"kind", envs::to_string(cfg.source_env.kind)},
                {"source", io::env_params_to_json(cfg.source_env)},
                {"target", io::env_params_to_json(cfg.target_env)}};
  doc["env"]["source"].erase("kind");
  doc["env"]["target"].erase("kind");
  doc["model"] = {{"hidden", cfg.model.hidden},
                  {"ensemble_size", cfg.model.ensemble_size},
                  {"epochs", cfg.model.train.epochs},
                  {"batch_size", cfg.model.train.batch_size},
                  {"learning_rate", cfg.model.train.adam.lr},
                  {"lateral_init", lateral_to_string(cfg.model.lateral_init)}};
  doc["planner"] = {{"horizon", cfg.planner.horizon},
                    {"candidates", cfg.planner.candidates},
                    {"filter_beta", cfg.planner.filter_beta},
                    {"reward_temperature", cfg.planner.reward_temperature},
                    {"noise_sigma", cfg.planner.noise_sigma},
                    {"refinement_iters", cfg.planner.refinement_iters}};
  doc["selection"] = {{"lambda1", cfg.selection.lambda1},
                      {"rho", cfg.selection.rho},
                      {"rho_number", cfg.selection.rho_number},
                      {"final_score_window", cfg.selection.final_score_window},
                      {"strategy", replay::to_string(cfg.selection.strategy)},
                      {"eviction_fraction", cfg.eviction.fraction}};
  doc["run"] = {{"mode", to_string(cfg.mode)},
                {"iterations", cfg.iterations},
                {"rollouts_per_iter", cfg.rollouts_per_iter},
                {"steps_per_rollout", cfg.steps_per_rollout},
                {"random_rollouts", cfg.random_rollouts},
                {"source_iterations", cfg.source_iterations},
                {"seeds", cfg.seeds},
                {"reward_threshold", cfg.reward_threshold},
                {"score_threshold", cfg.score_threshold}};
  return doc.dump(2);
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  io::write_file(path, config_to_json(cfg) + "\n");
}

}  // namespace ptl::experiment
