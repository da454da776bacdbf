#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagafs/feature_mask.hpp"
#include "sagafs/induction.hpp"

namespace sagafs {

/// One point on a run's progress curve.
struct TraceEvent {
  double elapsed_seconds = 0.0;
  std::uint64_t instances_processed = 0;
  std::uint64_t surrogate_evals = 0;
  std::uint64_t full_evals = 0;
  double best_true_fitness = 0.0;
  std::uint64_t generation = 0;
  std::string stage;  // "chc", "surrogate", "final"
};

/// One CHC run at a surrogate level (one perseverance repetition).
struct LevelRecord {
  int level = 0;       // b .. 1, counting down
  int repetition = 0;  // 0 .. sp-1
  std::size_t sample_size = 0;
  std::size_t pop_size = 0;
  std::size_t generations = 0;
  bool switched_by_control = false;
  double candidate_surrogate_fitness = 0.0;
  double candidate_true_fitness = 0.0;
  FeatureMask candidate;
};

struct RunReport {
  std::string algorithm;
  std::string dataset_id;
  std::uint64_t run_seed = 0;
  std::uint64_t split_seed = 0;

  FeatureMask best_mask;
  double validation_accuracy = 0.0;  // true fitness of best_mask
  double test_accuracy = 0.0;

  // surrogate-stage output (SAGA only)
  std::optional<FeatureMask> surrogate_best;
  double surrogate_best_true_fitness = 0.0;
  EvalBudgetCounter surrogate_stage_budget;

  EvalBudgetCounter budget;
  std::uint64_t generations = 0;
  double elapsed_seconds = 0.0;
  std::vector<TraceEvent> trace;
  std::vector<LevelRecord> levels;
};

/// Equality on everything except wall-clock fields.
bool same_outcome(const RunReport& a, const RunReport& b);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sagafs
