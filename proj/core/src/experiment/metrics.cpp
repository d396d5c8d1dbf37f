#include "ptl/experiment/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ptl/errors.hpp"

namespace ptl::experiment {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SuccessRates success_rates(const std::vector<replay::Trajectory>& trajs, double reward_threshold,
                           double score_threshold, int final_score_window) {
  require(!trajs.empty(), "success rates need at least one trajectory");
  SuccessRates sr;
  for (const auto& t : trajs) {
    if (t.total_reward() >= reward_threshold) sr.reward += 1.0;
    if (t.mean_final_score(final_score_window) >= score_threshold) sr.score += 1.0;
  }
  sr.reward /= static_cast<double>(trajs.size());
  sr.score /= static_cast<double>(trajs.size());
  return sr;
}

std::string format_metrics_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.iteration << ',' << fmt_double(r.mean_reward) << ',' << fmt_double(r.mean_score) << ','
        << fmt_double(r.sr_reward) << ',' << fmt_double(r.sr_score) << ',' << r.datapoints << ','
        << fmt_double(r.wall_seconds) << '\n';
  }
  return out.str();
}

void write_metrics_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << format_metrics_csv(records);
}

std::vector<IterationRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw ArtifactError("bad or missing header in " + path.string());
  std::vector<IterationRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ArtifactError(path.string() + ":" + std::to_string(row) + ": expected 7 columns");
    try {
      IterationRecord r;
      r.iteration = std::stoi(cells[0]);
      r.mean_reward = std::stod(cells[1]);
      r.mean_score = std::stod(cells[2]);
      r.sr_reward = std::stod(cells[3]);
      r.sr_score = std::stod(cells[4]);
      r.datapoints = std::stoll(cells[5]);
      r.wall_seconds = std::stod(cells[6]);
      out.push_back(r);
    } catch (const std::exception&) {
      throw ArtifactError(path.string() + ":" + std::to_string(row) + ": malformed number");
    }
  }
  return out;
}

std::string metrics_file_name(const std::string& mode, std::uint64_t seed) {
  return "metrics_" + mode + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace ptl::experiment
