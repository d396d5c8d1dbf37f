#include "ptl/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "ptl/errors.hpp"

namespace ptl::cli {
namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

template <class F>
MeanStd stat_of(const std::vector<const experiment::IterationRecord*>& recs, F field) {
  std::vector<double> v;
  v.reserve(recs.size());
  for (const auto* r : recs) v.push_back(field(*r));
  return mean_std(v);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + p.string());
  out << text;
}

}  // namespace

std::vector<RunSeries> load_runs(const std::vector<std::filesystem::path>& run_dirs) {
  static const std::regex pattern(R"(metrics_([A-Za-z_]+)_seed([0-9]+)\.csv)");
  std::vector<RunSeries> runs;
  std::vector<std::string> problems;
  for (const auto& dir : run_dirs) {
    if (!std::filesystem::is_directory(dir)) {
      problems.push_back(dir.string() + ": not a directory");
      continue;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::size_t found = 0;
    for (const auto& f : files) {
      std::smatch m;
      const std::string name = f.filename().string();
      if (!std::regex_match(name, m, pattern)) continue;
      ++found;
      try {
        RunSeries s;
        s.mode = m[1];
        s.seed = std::stoull(m[2]);
        s.path = f;
        s.records = experiment::read_metrics_csv(f);
        if (s.records.empty()) throw ArtifactError("no records");
        runs.push_back(std::move(s));
      } catch (const std::exception& e) {
        problems.push_back(f.string() + ": " + e.what());
      }
    }
    if (found == 0) problems.push_back(dir.string() + ": no metrics_<mode>_seed<S>.csv files");
  }
  if (!problems.empty()) {
    std::string msg = "report: invalid or missing metrics files:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ArtifactError(msg);
  }
  return runs;
}

MeanStd mean_std(const std::vector<double>& values) {
  require(!values.empty(), "mean_std of an empty set");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunSeries>& runs) {
  std::map<std::string, std::vector<const experiment::IterationRecord*>> finals;
  for (const auto& r : runs) finals[r.mode].push_back(&r.records.back());
  std::vector<SummaryRow> rows;
  for (const auto& [mode, recs] : finals) {
    SummaryRow row;
    row.mode = mode;
    row.seeds = static_cast<int>(recs.size());
    row.reward = stat_of(recs, [](const auto& r) { return r.mean_reward; });
    row.score = stat_of(recs, [](const auto& r) { return r.mean_score; });
    row.sr_reward = stat_of(recs, [](const auto& r) { return r.sr_reward; });
    row.sr_score = stat_of(recs, [](const auto& r) { return r.sr_score; });
    row.datapoints = stat_of(recs, [](const auto& r) { return static_cast<double>(r.datapoints); });
    row.wall_seconds = stat_of(recs, [](const auto& r) { return r.wall_seconds; });
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurvePoint> curves(const std::vector<RunSeries>& runs) {
  std::map<std::pair<std::string, int>, std::vector<const experiment::IterationRecord*>> by_iter;
  for (const auto& r : runs)
    for (const auto& rec : r.records) by_iter[{r.mode, rec.iteration}].push_back(&rec);
  std::vector<CurvePoint> out;
  for (const auto& [key, recs] : by_iter) {
    CurvePoint p;
    p.mode = key.first;
    p.iteration = key.second;
    p.seeds = static_cast<int>(recs.size());
    p.reward = stat_of(recs, [](const auto& r) { return r.mean_reward; });
    p.score = stat_of(recs, [](const auto& r) { return r.mean_score; });
    p.sr_reward = stat_of(recs, [](const auto& r) { return r.sr_reward; });
    p.sr_score = stat_of(recs, [](const auto& r) { return r.sr_score; });
    p.datapoints = stat_of(recs, [](const auto& r) { return static_cast<double>(r.datapoints); });
    out.push_back(p);
  }
  return out;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "mode,seeds,reward_mean,reward_std,score_mean,score_std,sr_reward_mean,sr_reward_std,"
        "sr_score_mean,sr_score_std,datapoints_mean,datapoints_std,wall_seconds_mean,wall_seconds_std\n";
  for (const auto& r : rows) {
    os << r.mode << ',' << r.seeds;
    for (const MeanStd* m : {&r.reward, &r.score, &r.sr_reward, &r.sr_score, &r.datapoints, &r.wall_seconds})
      os << ',' << num(m->mean) << ',' << num(m->std);
    os << '\n';
  }
  return os.str();
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  const std::vector<std::string> header{"mode", "seeds", "reward", "score", "SR_reward", "SR_score",
                                        "datapoints", "wall_s"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    auto pm = [](const MeanStd& m, int d) { return fixed(m.mean, d) + " +- " + fixed(m.std, d); };
    cells.push_back({r.mode, std::to_string(r.seeds), pm(r.reward, 2), pm(r.score, 4), pm(r.sr_reward, 3),
                     pm(r.sr_score, 3), pm(r.datapoints, 0), pm(r.wall_seconds, 1)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      if (c == 0) {
        os << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        os << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string format_curves_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  os << "mode,iter,seeds,reward_mean,reward_std,score_mean,score_std,sr_reward_mean,sr_reward_std,"
        "sr_score_mean,sr_score_std,datapoints_mean,datapoints_std\n";
  for (const auto& p : points) {
    os << p.mode << ',' << p.iteration << ',' << p.seeds;
    for (const MeanStd* m : {&p.reward, &p.score, &p.sr_reward, &p.sr_score, &p.datapoints})
      os << ',' << num(m->mean) << ',' << num(m->std);
    os << '\n';
  }
  return os.str();
}

void write_report(const std::vector<RunSeries>& runs, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto rows = summarize(runs);
  write_text(out_dir / "summary.csv", format_summary_csv(rows));
  write_text(out_dir / "summary.txt", format_summary_table(rows));
  write_text(out_dir / "curves.csv", format_curves_csv(curves(runs)));
}

}  // namespace ptl::cli
