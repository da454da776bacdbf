#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "sagafs/data.hpp"
#include "sagafs/feature_mask.hpp"

namespace sagafs {

/// Binary decision tree. Node 0 is the root; a node with feature < 0 is a leaf.
struct TreeModel {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;
  FeatureMask mask;
  std::size_t trained_on = 0;
  int n_classes = 0;

  std::size_t depth() const;
  std::size_t n_leaves() const;
  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

/// CART with Gini impurity, unlimited depth, min samples to split = 2.
///
/// Candidate thresholds are midpoints between consecutive distinct values. Equal
/// impurity ties go to the smaller feature index, then the smaller threshold.
/// Impurities are compared as exact rationals so ties are real ties.
TreeModel fit_tree(const TableData& rows, const FeatureMask& mask);

Eigen::VectorXi predict(const TreeModel& model, const TableData& rows, const FeatureMask& mask);

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

/// Accuracy of always predicting the most frequent class (ties: smallest id).
double majority_baseline(const Eigen::VectorXi& labels);

struct EvalBudgetCounter {
  std::uint64_t surrogate_evals = 0;
  std::uint64_t full_evals = 0;
  std::uint64_t instances_processed = 0;
  std::uint64_t surrogate_instances = 0;
  std::uint64_t full_instances = 0;
  std::uint64_t cache_hits = 0;

  std::uint64_t total_evals() const { return surrogate_evals + full_evals; }
  friend bool operator==(const EvalBudgetCounter&, const EvalBudgetCounter&) = default;
};

enum class Fidelity { Surrogate, Full };

/// One wrapper fitness call: fit on `train_view`, score on the whole validation split.
/// Empty masks are repaired in place from `repair_seed`.
double fitness(FeatureMask& mask, const TableData& train_view, const TableData& validation,
               EvalBudgetCounter& counter, Fidelity fidelity, std::uint64_t repair_seed);

/// Memoizing wrapper fitness over one fixed training view.
///
/// A surrogate evaluator owns the sampled rows; a full evaluator references the
/// complete training split. Cache hits are tallied but consume no instances.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const TableData& train, const TableData& validation, EvalBudgetCounter& counter,
                   std::uint64_t repair_seed);
  FitnessEvaluator(const TableData& train, const SampleHandle& sample, const TableData& validation,
                   EvalBudgetCounter& counter, std::uint64_t repair_seed);

  FitnessEvaluator(const FitnessEvaluator&) = delete;
  FitnessEvaluator& operator=(const FitnessEvaluator&) = delete;

  double operator()(FeatureMask& mask);
  double operator()(const FeatureMask& mask);

  Fidelity fidelity() const { return fidelity_; }
  std::size_t training_rows() const { return static_cast<std::size_t>(view().n_instances()); }
  const TableData& view() const { return sampled_ ? *sampled_ : *train_; }

 private:
  const TableData* train_;
  std::optional<TableData> sampled_;
  const TableData* validation_;
  EvalBudgetCounter* counter_;
  std::uint64_t repair_seed_;
  Fidelity fidelity_;
  std::unordered_map<FeatureMask, double> cache_;
};

/// Test accuracy of a tree trained on all of `train` with `mask`.
double holdout_accuracy(const TableData& train, const TableData& holdout, const FeatureMask& mask);

}  // namespace sagafs
