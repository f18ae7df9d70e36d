#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsopt/detection.hpp"
#include "nsopt/distributions.hpp"
#include "nsopt/harness.hpp"

namespace nsopt::cli {

enum class ExperimentKind { Simulate, Replay, Sweep };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;

  // Synthetic demand: either a hard-instance family or an instance file.
  std::optional<InstanceFamily> family;
  double budget = 4.0;  // S for switch families, V for drift families
  std::optional<double> epsilon;
  std::optional<std::filesystem::path> instance;
  std::vector<std::size_t> horizons;

  std::optional<std::filesystem::path> data;  // replay

  // Linear newsvendor: give b directly or derive it from the critical ratio.
  double h = 1.0;
  std::optional<double> b;
  std::optional<double> ratio;  // defaults to 0.7 when b is absent
  double a = 1.0;
  double v = 0.5;

  double delta = 0.1;
  double kappa = 1.0;
  CandidateGrid grid = CandidateGrid::Geometric;

  std::vector<std::string> policies{"nsaa"};
  std::size_t seeds = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: one per hardware thread

  std::filesystem::path out = "out";
  bool write_traces = true;

  // Fills b from the ratio (or the ratio from b) and checks consistency.
  void resolve();
  CostParams costs() const;
  RunOptions run_options() const;
  // Seed of replication i; policies share it so they face identical demand.
  std::uint64_t replication_seed(std::size_t i) const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

// One-column (value) or two-column (date,value) CSV with an optional header.
std::vector<double> ingest_dataset(const std::filesystem::path& path);
std::vector<double> parse_dataset(const std::string& text);

// Runs the experiment, writes CSV and summary.json under cfg.out, and returns
// the summary.
nlohmann::json run_experiment(ExperimentConfig cfg);

}  // namespace nsopt::cli
