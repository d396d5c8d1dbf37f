#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ptl/experiment/metrics.hpp"

namespace ptl::cli {

/// One metrics file: a (mode, seed) learning curve.
struct RunSeries {
  std::string mode;
  std::uint64_t seed = 0;
  std::filesystem::path path;
  std::vector<experiment::IterationRecord> records;
};

/// Finds and parses every metrics_<mode>_seed<S>.csv under the given run
/// directories (non-recursive). Throws ArtifactError listing every missing
/// directory or unreadable file.
std::vector<RunSeries> load_runs(const std::vector<std::filesystem::path>& run_dirs);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< population std; 0 for a single run
};

MeanStd mean_std(const std::vector<double>& values);

/// Final-iteration statistics across seeds for one mode.
struct SummaryRow {
  std::string mode;
  int seeds = 0;
  MeanStd reward, score, sr_reward, sr_score, datapoints, wall_seconds;
};

/// Rows sorted by mode name.
std::vector<SummaryRow> summarize(const std::vector<RunSeries>& runs);

struct CurvePoint {
  std::string mode;
  int iteration = 0;
  int seeds = 0;
  MeanStd reward, score, sr_reward, sr_score, datapoints;
};

/// Per-iteration statistics over the seeds that reached that iteration.
std::vector<CurvePoint> curves(const std::vector<RunSeries>& runs);

std::string format_summary_csv(const std::vector<SummaryRow>& rows);
std::string format_summary_table(const std::vector<SummaryRow>& rows);
std::string format_curves_csv(const std::vector<CurvePoint>& points);

/// Writes summary.csv, summary.txt and curves.csv into `out_dir`.
void write_report(const std::vector<RunSeries>& runs, const std::filesystem::path& out_dir);

}  // namespace ptl::cli
