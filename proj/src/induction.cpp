#include "sagafs/induction.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "sagafs/rng.hpp"

namespace sagafs {

namespace {

using Wide = __int128;

int majority_label(std::span<const std::int64_t> counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

// A split scores A/B with A = sumsqL*nR + sumsqR*nL and B = nL*nR, which equals
// sumsqL/nL + sumsqR/nR. Larger is better (lower weighted Gini).
struct SplitScore {
  Wide num = 0;
  Wide den = 0;
};

bool better(const SplitScore& a, const SplitScore& b) { return a.num * b.den > b.num * a.den; }

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  SplitScore score;
};

struct Frame {
  std::size_t begin;
  std::size_t end;
  int node;
};

}  // namespace

std::size_t TreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const Node& n = nodes[static_cast<std::size_t>(id)];
    if (n.is_leaf()) {
      deepest = std::max(deepest, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

std::size_t TreeModel::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_leaf(); }));
}

TreeModel fit_tree(const TableData& rows, const FeatureMask& mask) {
  if (mask.size() != static_cast<std::size_t>(rows.n_features())) {
    throw std::invalid_argument("fit_tree: mask length differs from feature count");
  }
  const auto features = mask.selected();
  if (features.empty()) throw std::invalid_argument("fit_tree: empty feature mask");
  if (rows.n_instances() < 1) throw std::invalid_argument("fit_tree: no training rows");

  const auto n_classes = static_cast<std::size_t>(rows.n_classes);
  TreeModel model;
  model.mask = mask;
  model.trained_on = static_cast<std::size_t>(rows.n_instances());
  model.n_classes = rows.n_classes;
  model.nodes.emplace_back();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(rows.n_instances()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);

  std::vector<std::int64_t> parent(n_classes), left(n_classes), right(n_classes);
  std::vector<std::pair<double, int>> sorted;
  std::vector<Frame> stack{{0, idx.size(), 0}};

  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    const auto n = static_cast<std::int64_t>(frame.end - frame.begin);

    std::fill(parent.begin(), parent.end(), 0);
    for (std::size_t i = frame.begin; i < frame.end; ++i) ++parent[static_cast<std::size_t>(rows.labels[idx[i]])];
    model.nodes[static_cast<std::size_t>(frame.node)].label = majority_label(parent);

    const bool pure = std::count_if(parent.begin(), parent.end(), [](auto c) { return c > 0; }) <= 1;
    if (pure || n < 2) continue;

    Wide parent_sumsq = 0;
    for (auto c : parent) parent_sumsq += Wide{c} * c;

    Candidate best;
    for (const std::size_t f : features) {
      const double* column = rows.features.col(static_cast<Eigen::Index>(f)).data();
      sorted.clear();
      for (std::size_t i = frame.begin; i < frame.end; ++i) {
        sorted.emplace_back(column[idx[i]], rows.labels[idx[i]]);
      }
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (sorted.front().first == sorted.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      right = parent;
      Wide sumsq_left = 0;
      Wide sumsq_right = parent_sumsq;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto c = static_cast<std::size_t>(sorted[i].second);
        sumsq_left += 2 * Wide{left[c]} + 1;
        sumsq_right -= 2 * Wide{right[c]} - 1;
        ++left[c];
        --right[c];
        if (!(sorted[i].first < sorted[i + 1].first)) continue;

        const auto n_left = static_cast<std::int64_t>(i + 1);
        const auto n_right = n - n_left;
        const SplitScore score{sumsq_left * n_right + sumsq_right * n_left, Wide{n_left} * n_right};
        if (best.feature < 0 || better(score, best.score)) {
          const double lo = sorted[i].first;
          const double hi = sorted[i + 1].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = Candidate{static_cast<int>(f), mid, score};
        }
      }
    }

    // split only if weighted impurity strictly drops: A/B > parent_sumsq/n
    if (best.feature < 0 || !(best.score.num * n > parent_sumsq * best.score.den)) continue;

    const double* column = rows.features.col(best.feature).data();
    const auto mid_it = std::stable_partition(
        idx.begin() + static_cast<std::ptrdiff_t>(frame.begin),
        idx.begin() + static_cast<std::ptrdiff_t>(frame.end),
        [&](Eigen::Index r) { return column[r] <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid_it - idx.begin());

    const int left_id = static_cast<int>(model.nodes.size());
    const int right_id = left_id + 1;
    model.nodes.emplace_back();
    model.nodes.emplace_back();
    auto& node = model.nodes[static_cast<std::size_t>(frame.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = right_id;

    stack.push_back({split_at, frame.end, right_id});
    stack.push_back({frame.begin, split_at, left_id});
  }
  return model;
}

Eigen::VectorXi predict(const TreeModel& model, const TableData& rows, const FeatureMask& mask) {
  if (!(mask == model.mask)) throw std::invalid_argument("predict: mask differs from fit-time mask");
  if (rows.n_features() != static_cast<Eigen::Index>(mask.size())) {
    throw std::invalid_argument("predict: feature count differs from mask length");
  }
  Eigen::VectorXi out(rows.n_instances());
  for (Eigen::Index r = 0; r < rows.n_instances(); ++r) {
    const TreeModel::Node* node = &model.nodes.front();
    while (!node->is_leaf()) {
      const auto next = rows.features(r, node->feature) <= node->threshold ? node->left : node->right;
      node = &model.nodes[static_cast<std::size_t>(next)];
    }
    out[r] = node->label;
  }
  return out;
}

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
  if (predicted.size() != truth.size() || truth.size() == 0) {
    throw std::invalid_argument("accuracy: size mismatch or empty");
  }
  return static_cast<double>((predicted.array() == truth.array()).count()) /
         static_cast<double>(truth.size());
}

double majority_baseline(const Eigen::VectorXi& labels) {
  if (labels.size() == 0) throw std::invalid_argument("majority_baseline: empty labels");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(labels.maxCoeff()) + 1, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) ++counts[static_cast<std::size_t>(labels[i])];
  return static_cast<double>(counts[static_cast<std::size_t>(majority_label(counts))]) /
         static_cast<double>(labels.size());
}

double fitness(FeatureMask& mask, const TableData& train_view, const TableData& validation,
               EvalBudgetCounter& counter, Fidelity fidelity, std::uint64_t repair_seed) {
  Rng repair_rng(repair_seed);
  repair_empty(mask, repair_rng);
  const TreeModel model = fit_tree(train_view, mask);
  const double acc = accuracy(predict(model, validation, mask), validation.labels);

  const auto rows = static_cast<std::uint64_t>(train_view.n_instances());
  counter.instances_processed += rows;
  if (fidelity == Fidelity::Surrogate) {
    ++counter.surrogate_evals;
    counter.surrogate_instances += rows;
  } else {
    ++counter.full_evals;
    counter.full_instances += rows;
  }
  return acc;
}

FitnessEvaluator::FitnessEvaluator(const TableData& train, const TableData& validation,
                                   EvalBudgetCounter& counter, std::uint64_t repair_seed)
    : train_(&train),
      validation_(&validation),
      counter_(&counter),
      repair_seed_(repair_seed),
      fidelity_(Fidelity::Full) {}

FitnessEvaluator::FitnessEvaluator(const TableData& train, const SampleHandle& sample,
                                   const TableData& validation, EvalBudgetCounter& counter,
                                   std::uint64_t repair_seed)
    : train_(&train),
      sampled_(take_rows(train, sample.indices)),
      validation_(&validation),
      counter_(&counter),
      repair_seed_(repair_seed),
      fidelity_(Fidelity::Surrogate) {}

double FitnessEvaluator::operator()(FeatureMask& mask) {
  Rng repair_rng(repair_seed_);
  repair_empty(mask, repair_rng);
  if (const auto hit = cache_.find(mask); hit != cache_.end()) {
    ++counter_->cache_hits;
    return hit->second;
  }
  const double value = fitness(mask, view(), *validation_, *counter_, fidelity_, repair_seed_);
  cache_.emplace(mask, value);
  return value;
}

double FitnessEvaluator::operator()(const FeatureMask& mask) {
  FeatureMask copy = mask;
  return (*this)(copy);
}

double holdout_accuracy(const TableData& train, const TableData& holdout, const FeatureMask& mask) {
  const TreeModel model = fit_tree(train, mask);
  return accuracy(predict(model, holdout, mask), holdout.labels);
}

}  // namespace sagafs
