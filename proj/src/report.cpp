#include "sagafs/report.hpp"

namespace sagafs {

namespace {

bool same_trace(const std::vector<TraceEvent>& a, const std::vector<TraceEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.instances_processed != y.instances_processed || x.surrogate_evals != y.surrogate_evals ||
        x.full_evals != y.full_evals || x.best_true_fitness != y.best_true_fitness ||
        x.generation != y.generation || x.stage != y.stage) {
      return false;
    }
  }
  return true;
}

bool same_levels(const std::vector<LevelRecord>& a, const std::vector<LevelRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.level != y.level || x.repetition != y.repetition || x.sample_size != y.sample_size ||
        x.pop_size != y.pop_size || x.generations != y.generations ||
        x.switched_by_control != y.switched_by_control ||
        x.candidate_surrogate_fitness != y.candidate_surrogate_fitness ||
        x.candidate_true_fitness != y.candidate_true_fitness || !(x.candidate == y.candidate)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool same_outcome(const RunReport& a, const RunReport& b) {
  return a.algorithm == b.algorithm && a.dataset_id == b.dataset_id && a.run_seed == b.run_seed &&
         a.split_seed == b.split_seed && a.best_mask == b.best_mask &&
         a.validation_accuracy == b.validation_accuracy && a.test_accuracy == b.test_accuracy &&
         a.surrogate_best == b.surrogate_best &&
         a.surrogate_best_true_fitness == b.surrogate_best_true_fitness &&
         a.surrogate_stage_budget == b.surrogate_stage_budget && a.budget == b.budget &&
         a.generations == b.generations && same_trace(a.trace, b.trace) &&
         same_levels(a.levels, b.levels);
}

}  // namespace sagafs
