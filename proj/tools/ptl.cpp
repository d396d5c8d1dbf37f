// ptl: source training, transfer, evaluation, selection and reporting.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ptl/cli/report.hpp"
#include "ptl/dynamics/checkpoint.hpp"
#include "ptl/errors.hpp"
#include "ptl/experiment/config.hpp"
#include "ptl/experiment/experiment.hpp"
#include "ptl/replay/selection.hpp"
#include "ptl/replay/store.hpp"

namespace fs = std::filesystem;
using namespace ptl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::uint64_t> seeds_for(const experiment::RunConfig& cfg, const std::optional<std::uint64_t>& seed) {
  if (seed) return {*seed};
  return cfg.seeds;
}

void print_record(const experiment::IterationRecord& r) {
  std::cout << experiment::format_metrics_csv({r});
}

int cmd_train_source(const fs::path& config, const fs::path& out, const std::optional<std::uint64_t>& seed) {
  experiment::RunConfig cfg = experiment::load_config(config);
  cfg.mode = experiment::Mode::kSource;
  const std::uint64_t s = seed ? *seed : cfg.seeds.front();
  cfg.seeds = {s};
  const auto result = experiment::run_source_training(cfg, s);
  experiment::write_source_run(out, cfg, s, result);
  print_record(result.records.back());
  return kExitOk;
}

int cmd_transfer(const fs::path& config, const std::string& mode, const std::optional<fs::path>& source,
                 const fs::path& out, const std::optional<std::uint64_t>& seed) {
  experiment::RunConfig cfg = experiment::load_config(config);
  cfg.mode = experiment::mode_from_string(mode);
  if (cfg.mode == experiment::Mode::kSource) throw ConfigError("--mode: use train-source for source runs");
  cfg.seeds = seeds_for(cfg, seed);
  cfg.validate();
  std::optional<experiment::SourceArtifacts> artifacts;
  if (experiment::needs_source_model(cfg.mode)) {
    if (!source) throw ConfigError("--source is required for mode " + mode);
    artifacts = experiment::load_source_run(*source);
  }
  for (std::uint64_t s : cfg.seeds) {
    const auto result = experiment::run_transfer(cfg, s, artifacts ? &*artifacts : nullptr);
    experiment::write_transfer_run(out, cfg, s, result);
    if (!result.records.empty()) print_record(result.records.back());
  }
  return kExitOk;
}

int cmd_evaluate(const fs::path& checkpoint, const fs::path& config, int rollouts,
                 const std::optional<std::uint64_t>& seed, const std::optional<fs::path>& out) {
  const experiment::RunConfig cfg = experiment::load_config(config);
  if (rollouts < 1) throw ConfigError("--rollouts must be >= 1");
  const dynamics::AnyModel model = dynamics::load_model(checkpoint);
  std::vector<replay::Trajectory> trajs;
  const auto rec = experiment::evaluate_model(cfg, cfg.target_env, dynamics::as_model(model), rollouts,
                                              seed ? *seed : cfg.seeds.front(), &trajs);
  print_record(rec);
  if (out) replay::write_store(*out, trajs);
  return kExitOk;
}

int cmd_select(const fs::path& store, const fs::path& config, const fs::path& out,
               const std::optional<std::uint64_t>& seed) {
  const experiment::RunConfig cfg = experiment::load_config(config);
  if (!fs::exists(store)) throw ArtifactError("missing trajectory store " + store.string());
  replay::TrajectoryBuffer buffer;
  buffer.add_all(replay::TrajectoryStore(store).load());
  nn::RngStream rng(seed ? *seed : cfg.seeds.front(), nn::StreamId::kSelection);
  const auto selected = replay::select_transfer_samples(buffer, cfg.selection, rng);
  replay::write_store(out, selected);
  std::cout << "selected " << selected.size() << " of " << buffer.size() << " trajectories\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& runs, const std::optional<fs::path>& out) {
  std::vector<fs::path> dirs(runs.begin(), runs.end());
  const auto series = cli::load_runs(dirs);
  const auto rows = cli::summarize(series);
  std::cout << cli::format_summary_table(rows);
  cli::write_report(series, out ? *out : dirs.front());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Progressive transfer learning for model-based dexterous manipulation"};
  app.require_subcommand(1);

  std::string config, mode;
  std::string out, source, checkpoint, store;
  std::optional<std::uint64_t> seed;
  int rollouts = 10;
  std::vector<std::string> runs;

  auto* train = app.add_subcommand("train-source", "Train the source-scene model and store its trajectories");
  train->add_option("--config", config, "Run config JSON")->required();
  train->add_option("--out", out, "Output run directory")->required();
  train->add_option("--seed", seed, "Seed override");

  auto* transfer = app.add_subcommand("transfer", "Run a transfer experiment on the target scene");
  transfer->add_option("--config", config, "Run config JSON")->required();
  transfer->add_option("--mode", mode, "Transfer mode")
      ->required()
      ->check(CLI::IsMember({"ptl", "finetune", "finetune_scratch", "scratch", "pnn_out"}));
  transfer->add_option("--source", source, "Source run directory");
  transfer->add_option("--out", out, "Output run directory")->required();
  transfer->add_option("--seed", seed, "Seed override (default: every seed in the config)");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint with MPC rollouts on the target env");
  evaluate->add_option("--checkpoint", checkpoint, "Model checkpoint JSON")->required();
  evaluate->add_option("--config", config, "Run config JSON")->required();
  evaluate->add_option("--rollouts", rollouts, "Number of rollouts")->required();
  evaluate->add_option("--seed", seed, "Seed override");
  evaluate->add_option("--out", out, "Optional JSONL file for the evaluation trajectories");

  auto* select = app.add_subcommand("select", "Prioritized selection of transfer samples from a store");
  select->add_option("--store", store, "Trajectory JSONL store")->required();
  select->add_option("--config", config, "Run config JSON")->required();
  select->add_option("--out", out, "Output JSONL file")->required();
  select->add_option("--seed", seed, "Seed override");

  auto* report = app.add_subcommand("report", "Summary table and per-iteration curves over run directories");
  report->add_option("--runs", runs, "Run directories")->required()->expected(1, -1);
  report->add_option("--out", out, "Directory for summary.csv, summary.txt and curves.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  try {
    if (*train) return cmd_train_source(config, out, seed);
    if (*transfer) return cmd_transfer(config, mode, opt_path(source), out, seed);
    if (*evaluate) return cmd_evaluate(checkpoint, config, rollouts, seed, opt_path(out));
    if (*select) return cmd_select(store, config, out, seed);
    if (*report) return cmd_report(runs, opt_path(out));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
