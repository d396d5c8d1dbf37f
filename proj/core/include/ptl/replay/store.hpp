#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ptl/replay/trajectory.hpp"

namespace ptl::replay {

std::string trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const std::string& line);

/// Append-only JSON-lines trajectory file. Eviction is logical: removed ids are
/// appended to a sidecar "<file>.tombstones" index and skipped on load.
class TrajectoryStore {
 public:
  explicit TrajectoryStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path tombstone_path() const;

  void append(const Trajectory& t);
  void append(const std::vector<Trajectory>& ts);
  void tombstone(const std::vector<std::string>& ids);

  /// Live trajectories in file order. Throws ArtifactError on a malformed line.
  std::vector<Trajectory> load() const;
  std::vector<std::string> tombstoned_ids() const;

 private:
  std::filesystem::path path_;
};

/// Writes a fresh store (truncating any previous file and tombstones).
void write_store(const std::filesystem::path& path, const std::vector<Trajectory>& ts);

}  // namespace ptl::replay
