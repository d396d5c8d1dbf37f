#include "ptl/replay/store.hpp"

#include <fstream>
#include <unordered_set>

#include "json_io.hpp"
#include "ptl/errors.hpp"
#include "store_json.hpp"

namespace ptl::replay {

using io::Json;

std::string trajectory_to_json(const Trajectory& t) {
  Json states = Json::array();
  for (const auto& s : t.states) states.push_back(io::vector_to_json(s));
  Json actions = Json::array();
  for (const auto& a : t.actions) actions.push_back(io::vector_to_json(a));
  Json j{{"id", t.id},
         {"origin", to_string(t.origin)},
         {"iteration", t.iteration_created},
         {"seed", t.seed},
         {"env_params", io::env_params_to_json(t.env_params)},
         {"states", std::move(states)},
         {"actions", std::move(actions)},
         {"rewards", t.rewards},
         {"scores", t.scores},
         {"agent_state_indices", t.agent_state_indices}};
  return j.dump();
}

Trajectory trajectory_from_json(const std::string& line) {
  try {
    const Json j = Json::parse(line);
    Trajectory t;
    t.id = j.at("id").get<std::string>();
    t.origin = origin_from_string(j.at("origin").get<std::string>());
    t.iteration_created = j.at("iteration").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.env_params = io::env_params_from_json(j.at("env_params"));
    for (const auto& s : j.at("states")) t.states.push_back(io::vector_from_json(s));
    for (const auto& a : j.at("actions")) t.actions.push_back(io::vector_from_json(a));
    t.rewards = j.at("rewards").get<std::vector<double>>();
    t.scores = j.at("scores").get<std::vector<double>>();
    t.agent_state_indices = j.at("agent_state_indices").get<std::vector<int>>();
    t.validate();
    return t;
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("malformed trajectory record: ") + e.what());
  } catch (const RejectedInput& e) {
    throw ArtifactError(std::string("invalid trajectory record: ") + e.what());
  }
}

TrajectoryStore::TrajectoryStore(std::filesystem::path path) : path_(std::move(path)) {}

std::filesystem::path TrajectoryStore::tombstone_path() const {
  auto p = path_;
  p += ".tombstones";
  return p;
}

void TrajectoryStore::append(const Trajectory& t) { append(std::vector<Trajectory>{t}); }

void TrajectoryStore::append(const std::vector<Trajectory>& ts) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw ArtifactError("cannot append to " + path_.string());
  for (const auto& t : ts) out << trajectory_to_json(t) << '\n';
}

void TrajectoryStore::tombstone(const std::vector<std::string>& ids) {
  if (ids.empty()) return;
  std::ofstream out(tombstone_path(), std::ios::app | std::ios::binary);
  if (!out) throw ArtifactError("cannot append to " + tombstone_path().string());
  for (const auto& id : ids) out << id << '\n';
}

std::vector<std::string> TrajectoryStore::tombstoned_ids() const {
  std::vector<std::string> ids;
  std::ifstream in(tombstone_path());
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ids.push_back(line);
  return ids;
}

std::vector<Trajectory> TrajectoryStore::load() const {
  std::ifstream in(path_);
  if (!in) throw ArtifactError("cannot open trajectory store " + path_.string());
  const auto dead = tombstoned_ids();
  const std::unordered_set<std::string> dead_set(dead.begin(), dead.end());
  std::vector<Trajectory> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Trajectory t = trajectory_from_json(line);
      if (!dead_set.contains(t.id)) out.push_back(std::move(t));
    } catch (const ArtifactError& e) {
      throw ArtifactError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_store(const std::filesystem::path& path, const std::vector<Trajectory>& ts) {
  TrajectoryStore store(path);
  std::filesystem::remove(path);
  std::filesystem::remove(store.tombstone_path());
  store.append(ts);
}

}  // namespace ptl::replay
