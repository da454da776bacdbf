#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sagafs/chc.hpp"
#include "sagafs/data.hpp"
#include "sagafs/report.hpp"

namespace sagafs {

/// Geometric training-sample sizes, smallest level first: floor(N/a^b), ..., floor(N/a).
struct SamplingSchedule {
  double base = 2.0;
  int levels = 4;
  std::vector<std::size_t> sizes;

  /// Fraction of N at each level, exact (a^-i), smallest first.
  std::vector<double> fractions() const;
};

/// Sizes are floored and clamped to at least 2 rows.
SamplingSchedule build_schedule(std::size_t n, double a, int b);

struct SagaConfig {
  int b = 4;                // surrogate levels
  double pr = 0.5;          // population reduction rate
  std::size_t z = 10;       // generations between evolution-control checks
  bool fop = true;          // false-optimum prevention (evolution control)
  int sp = 1;               // surrogate perseverance
  bool so = false;          // stop after the surrogate stage
  std::size_t p0 = 40;      // initial population
  double a = 2.0;           // schedule base
  std::uint64_t seed = 0;

  /// Reduce the population after every level run, as the literal pseudocode does,
  /// instead of only when the level changes.
  bool strict_pseudocode_reduction = false;

  /// When non-zero, every level run stops once it has spent this many surrogate
  /// evaluations; stagnation and evolution control are ignored. Used to measure
  /// the fixed-evaluations cost bound.
  std::size_t level_eval_budget = 0;

  ChcConfig chc;  // stagnation limit, divergence rate, generation cap; pop_size unused

  void validate() const;
};

/// round-half-up(p0 * pr^reductions), at least 2.
std::size_t level_population(const SagaConfig& cfg, std::size_t reductions);

/// Population size of every surrogate-level run in execution order (b * sp entries).
std::vector<std::size_t> population_schedule(const SagaConfig& cfg);

struct ControlDecision {
  double new_true = 0.0;
  bool switch_level = false;
};

/// Re-scores the surrogate's best with the true fitness; switch unless it strictly improved.
ControlDecision evolution_control_check(const FeatureMask& current_best, double previous_true,
                                        const FitnessFn& true_fitness);

struct LevelState {
  int level = 0;  // b .. 1
  SampleHandle sample;
  std::size_t pop_size = 0;
  double best_true_fitness = -std::numeric_limits<double>::infinity();
  int persev_remaining = 1;
};

struct LevelOutcome {
  FeatureMask candidate;  // best by surrogate fitness
  double surrogate_fitness = 0.0;
  std::size_t generations = 0;
  bool switched_by_control = false;
  double last_true = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> checkpoints;  // generations at which control ran
};

struct LevelHooks {
  std::function<void(std::size_t generation, double true_fitness)> on_checkpoint;
  std::function<void(const Population&, const GenerationInfo&)> on_generation;
  std::function<bool()> stop;  // polled after every generation
};

/// One CHC run against a surrogate, with evolution control every z generations.
/// `state.best_true_fitness` seeds the control's previous value.
LevelOutcome run_level(const LevelState& state, std::size_t n_features,
                       const std::optional<FeatureMask>& incoming_best, const SagaConfig& cfg,
                       const FitnessFn& surrogate, const FitnessFn& true_fitness, Rng& rng,
                       const LevelHooks& hooks = {});

struct SurrogateStageResult {
  FeatureMask g_prime;
  double g_prime_true = 0.0;
  RunReport report;  // trace, level log and budget of the surrogate stage only
};

SurrogateStageResult run_surrogate_stage(const SplitData& split, const SagaConfig& cfg,
                                         const std::string& dataset_id = "");

RunReport run_saga(const SplitData& split, const SagaConfig& cfg, const std::string& dataset_id = "");

struct MatchResult {
  bool matched = false;
  double target = 0.0;
  std::size_t event_index = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t instances_processed = 0;
  std::uint64_t generation = 0;
};

/// For run i, the first event of baseline[i]'s trace whose best true fitness reaches
/// reference[i]'s final validation fitness.
std::vector<MatchResult> compare_runs(const std::vector<RunReport>& reference,
                                      const std::vector<RunReport>& baseline);

}  // namespace sagafs
