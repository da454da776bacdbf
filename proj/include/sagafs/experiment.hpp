#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sagafs/chc.hpp"
#include "sagafs/data.hpp"
#include "sagafs/report.hpp"
#include "sagafs/saga.hpp"

namespace sagafs {

/// Raised for invalid experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { Baseline, Chc, Saga };

struct ArmSpec {
  std::string label;
  Algorithm algorithm = Algorithm::Saga;
  SagaConfig saga;  // used by Saga arms
  ChcConfig chc;    // used by Chc arms
};

/// Builds an arm from a short name: baseline, chc, saga, saga_so.
ArmSpec make_arm(const std::string& name);

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::string target;
  std::string dataset_id;  // defaults to the dataset file stem
  CsvOptions csv;
  std::vector<ArmSpec> arms;
  std::size_t repetitions = 10;
  std::uint64_t split_seed = 0;
  std::uint64_t run_seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path output_dir = "results";

  void validate() const;
};

struct ArmResult {
  ArmSpec spec;
  std::vector<RunReport> runs;
};

struct ExperimentResult {
  std::string dataset_id;
  std::vector<ArmResult> arms;
};

/// Runs every arm `repetitions` times with seeds run_seed, run_seed+1, ... over one fixed split.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const SplitData& split);
/// Loads, preprocesses and splits the dataset named in the config first.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

RunReport run_baseline(const SplitData& split, std::uint64_t seed, const std::string& dataset_id);

/// summary.json, timing.json, trace_<arm>_<i>.csv, compare.csv, plus emit_tables output.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// table.csv (one row per dataset and arm) and fig_trace.csv (x, mean, std, label).
void emit_tables(const std::vector<ExperimentResult>& results, const std::filesystem::path& dir);

std::string table_csv(const std::vector<ExperimentResult>& results);
std::string fig_trace_csv(const std::vector<ExperimentResult>& results);
std::string compare_csv(const ExperimentResult& result);

// JSON persistence. Wall-clock fields are left out so the summary is reproducible.
nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ArmSpec& arm);
ArmSpec arm_from_json(const nlohmann::json& j);
nlohmann::json summary_json(const ExperimentResult& result);
ExperimentResult result_from_summary(const nlohmann::json& j);

/// Reads an experiment config document; unknown arm names or bad values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace sagafs
