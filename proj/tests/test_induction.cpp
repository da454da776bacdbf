#include <doctest.h>

#include <algorithm>
#include <memory>
#include <set>

#include "sagafs/induction.hpp"
#include "sagafs/rng.hpp"
#include "support.hpp"

using namespace sagafs;
using sagafs::testing::random_mask;
using sagafs::testing::random_table;
using sagafs::testing::table;

namespace {

// Independent CART: recursive, enumerates every (feature, midpoint) pair and
// compares weighted Gini as exact fractions of small integers.
struct OracleNode {
  int feature = -1;
  double threshold = 0.0;
  int label = 0;
  std::unique_ptr<OracleNode> left, right;
};

struct Fraction {
  long long num, den;
};

// sum_c count_c^2 / n for one side, as a fraction.
Fraction purity(const std::vector<int>& labels, int classes) {
  std::vector<long long> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  long long sq = 0;
  for (auto c : counts) sq += c * c;
  return {sq, static_cast<long long>(labels.size())};
}

Fraction add(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
bool greater(Fraction a, Fraction b) { return a.num * b.den > b.num * a.den; }

std::unique_ptr<OracleNode> oracle_fit(const TableData& t, const std::vector<Eigen::Index>& rows,
                                       const std::vector<std::size_t>& features) {
  auto node = std::make_unique<OracleNode>();
  std::vector<int> labels;
  for (auto r : rows) labels.push_back(t.labels(r));
  std::vector<int> counts(static_cast<std::size_t>(t.n_classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  node->label = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  if (std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1) return node;

  const Fraction parent = purity(labels, t.n_classes);
  bool found = false;
  Fraction best{0, 1};
  int best_f = -1;
  double best_thr = 0.0;
  for (std::size_t f : features) {
    std::set<double> values;
    for (auto r : rows) values.insert(t.features(r, static_cast<Eigen::Index>(f)));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double thr = v[i] + (v[i + 1] - v[i]) / 2.0;
      std::vector<int> l, r;
      for (auto row : rows) (t.features(row, static_cast<Eigen::Index>(f)) <= thr ? l : r).push_back(t.labels(row));
      const Fraction score = add(purity(l, t.n_classes), purity(r, t.n_classes));
      if (!found || greater(score, best)) {  // strict: earlier feature / smaller threshold wins ties
        found = true;
        best = score;
        best_f = static_cast<int>(f);
        best_thr = thr;
      }
    }
  }
  if (!found || !greater(best, parent)) return node;

  node->feature = best_f;
  node->threshold = best_thr;
  std::vector<Eigen::Index> l, r;
  for (auto row : rows) (t.features(row, best_f) <= best_thr ? l : r).push_back(row);
  node->left = oracle_fit(t, l, features);
  node->right = oracle_fit(t, r, features);
  return node;
}

bool same_tree(const TreeModel& model, int id, const OracleNode& o) {
  const auto& n = model.nodes[static_cast<std::size_t>(id)];
  if (n.feature != o.feature) return false;
  if (n.is_leaf()) return n.label == o.label;
  return n.threshold == o.threshold && same_tree(model, n.left, *o.left) && same_tree(model, n.right, *o.right);
}

int walk(const OracleNode& o, const TableData& t, Eigen::Index r) {
  const OracleNode* n = &o;
  while (n->feature >= 0) n = t.features(r, n->feature) <= n->threshold ? n->left.get() : n->right.get();
  return n->label;
}

std::vector<Eigen::Index> all_rows(const TableData& t) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(t.n_instances()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
  return rows;
}

}  // namespace

TEST_CASE("separable rows give one split at the midpoint") {
  const TableData t = table({{0, 0}, {1, 0}, {2, 1}, {3, 1}});
  const FeatureMask mask = FeatureMask::all(1);
  const TreeModel m = fit_tree(t, mask);
  REQUIRE(m.nodes.size() == 3);
  CHECK(m.nodes[0].feature == 0);
  CHECK(m.nodes[0].threshold == 1.5);
  CHECK(m.depth() == 1);
  CHECK(m.n_leaves() == 2);
  CHECK(m.trained_on == 4);
  CHECK(predict(m, t, mask) == t.labels);
  CHECK(accuracy(predict(m, t, mask), t.labels) == 1.0);
}

TEST_CASE("pure node is a single leaf") {
  const TableData t = table({{0, 1}, {5, 1}, {9, 1}});
  const FeatureMask mask = FeatureMask::all(1);
  const TreeModel m = fit_tree(t, mask);
  REQUIRE(m.nodes.size() == 1);
  CHECK(m.nodes[0].is_leaf());
  CHECK(m.nodes[0].label == 1);
  const TableData other = table({{-4, 0}, {100, 0}});
  CHECK(predict(m, other, mask) == Eigen::Vector2i(1, 1));
}

TEST_CASE("XOR-style table needs depth two") {
  const TableData t = table({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 1, 1},
                             {1, 0, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 0}});
  const FeatureMask mask = FeatureMask::all(2);
  const TreeModel m = fit_tree(t, mask);
  CHECK(m.depth() == 2);
  CHECK(accuracy(predict(m, t, mask), t.labels) == 1.0);
  const auto oracle = oracle_fit(t, all_rows(t), mask.selected());
  CHECK(same_tree(m, 0, *oracle));
}

TEST_CASE("split ties go to the smaller feature index") {
  // both columns separate the labels perfectly
  const TableData t = table({{0, 5, 0}, {1, 6, 0}, {2, 7, 1}, {3, 8, 1}});
  const TreeModel m = fit_tree(t, FeatureMask::all(2));
  CHECK(m.nodes[0].feature == 0);
  const TreeModel only_second = fit_tree(t, FeatureMask::from_string("01"));
  CHECK(only_second.nodes[0].feature == 1);
  CHECK(only_second.nodes[0].threshold == 6.5);
}

TEST_CASE("leaf ties go to the smallest class id") {
  const TableData t = table({{1, 1}, {1, 0}});
  const TreeModel m = fit_tree(t, FeatureMask::all(1));
  REQUIRE(m.nodes.size() == 1);
  CHECK(m.nodes[0].label == 0);
}

TEST_CASE("fit_tree matches the brute-force oracle on random tables") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.uniform_index(40));
    const auto k = static_cast<Eigen::Index>(1 + rng.uniform_index(5));
    const int classes = 2 + static_cast<int>(rng.uniform_index(3));
    const TableData t = random_table(rng, n, k, classes, 2 + static_cast<int>(rng.uniform_index(6)));
    const FeatureMask mask = random_mask(rng, static_cast<std::size_t>(k));
    const TreeModel m = fit_tree(t, mask);
    const auto oracle = oracle_fit(t, all_rows(t), mask.selected());
    CHECK(same_tree(m, 0, *oracle));
  }
}

TEST_CASE("predict agrees with an independent walk") {
  Rng rng(8);
  const TableData train = random_table(rng, 100, 4, 3, 8);
  const TableData probe = random_table(rng, 100, 4, 3, 10);
  const FeatureMask mask = FeatureMask::from_string("1011");
  const TreeModel m = fit_tree(train, mask);
  const auto oracle = oracle_fit(train, all_rows(train), mask.selected());
  const Eigen::VectorXi p = predict(m, probe, mask);
  for (Eigen::Index r = 0; r < probe.n_instances(); ++r) CHECK(p(r) == walk(*oracle, probe, r));

  // accuracy is a plain recount
  int correct = 0;
  for (Eigen::Index r = 0; r < probe.n_instances(); ++r) correct += p(r) == probe.labels(r);
  CHECK(accuracy(p, probe.labels) == static_cast<double>(correct) / 100.0);
}

TEST_CASE("duplicate-free training rows are fit exactly") {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    TableData t = random_table(rng, 30, 3, 3, 1000);
    for (Eigen::Index r = 0; r < t.n_instances(); ++r) t.features(r, 0) = static_cast<double>(r);  // distinct rows
    const FeatureMask mask = FeatureMask::all(3);
    CHECK(accuracy(predict(fit_tree(t, mask), t, mask), t.labels) == 1.0);
  }
}

TEST_CASE("tree induction is deterministic") {
  Rng rng(4);
  const TableData t = random_table(rng, 60, 5, 4);
  const FeatureMask mask = FeatureMask::from_string("11010");
  CHECK(fit_tree(t, mask) == fit_tree(t, mask));
}

TEST_CASE("fit and predict preconditions") {
  const TableData t = table({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(fit_tree(t, FeatureMask(1)), std::invalid_argument);
  CHECK_THROWS_AS(fit_tree(t, FeatureMask::all(2)), std::invalid_argument);
  const TreeModel m = fit_tree(t, FeatureMask::all(1));
  CHECK_THROWS_AS(predict(m, t, FeatureMask(1)), std::invalid_argument);
  CHECK_THROWS_AS(accuracy(Eigen::VectorXi(0), Eigen::VectorXi(0)), std::invalid_argument);
}

TEST_CASE("majority baseline") {
  CHECK(majority_baseline(Eigen::Vector3i(0, 0, 1)) == doctest::Approx(2.0 / 3.0));
  CHECK(majority_baseline(Eigen::Vector2i(0, 1)) == 0.5);
  Eigen::VectorXi uniform(100);
  for (int i = 0; i < 100; ++i) uniform(i) = i % 4;
  CHECK(majority_baseline(uniform) == 0.25);
}

TEST_CASE("fitness on training rows of separable data is 1") {
  const TableData t = table({{0, 0}, {1, 0}, {2, 1}, {3, 1}});
  EvalBudgetCounter counter;
  FeatureMask mask = FeatureMask::all(1);
  CHECK(fitness(mask, t, t, counter, Fidelity::Full, 1) == 1.0);
  CHECK(counter.full_evals == 1);
  CHECK(counter.full_instances == 4);
  CHECK(counter.instances_processed == 4);
  CHECK(counter.surrogate_evals == 0);
}

TEST_CASE("empty masks are repaired before evaluation") {
  Rng rng(31);
  const TableData t = random_table(rng, 20, 6, 2);
  EvalBudgetCounter counter;
  FeatureMask mask(6);
  const double f = fitness(mask, t, t, counter, Fidelity::Surrogate, 99);
  CHECK(mask.count() == 1);
  CHECK(f >= 0.0);
  FeatureMask again(6);
  fitness(again, t, t, counter, Fidelity::Surrogate, 99);
  CHECK(again == mask);
  CHECK(counter.surrogate_evals == 2);
}

TEST_CASE("evaluator memoizes and counts honestly") {
  Rng rng(12);
  const TableData train = random_table(rng, 50, 4, 2);
  const TableData val = random_table(rng, 20, 4, 2);
  EvalBudgetCounter counter;
  FitnessEvaluator full(train, val, counter, 5);
  CHECK(full.fidelity() == Fidelity::Full);
  CHECK(full.training_rows() == 50);

  const FeatureMask m = FeatureMask::from_string("0110");
  const double first = full(m);
  const double second = full(m);
  CHECK(first == second);
  CHECK(counter.full_evals == 1);
  CHECK(counter.cache_hits == 1);
  CHECK(counter.instances_processed == 50);

  SampleHandle sample = subsample(train, 10, 3);
  FitnessEvaluator surrogate(train, sample, val, counter, 5);
  CHECK(surrogate.fidelity() == Fidelity::Surrogate);
  CHECK(surrogate.training_rows() == 10);
  surrogate(m);
  CHECK(counter.surrogate_evals == 1);
  CHECK(counter.surrogate_instances == 10);
  CHECK(counter.instances_processed == 60);
  CHECK(counter.total_evals() == 2);
}

TEST_CASE("budget counters never decrease") {
  Rng rng(6);
  const TableData train = random_table(rng, 40, 5, 3);
  const TableData val = random_table(rng, 15, 5, 3);
  EvalBudgetCounter counter;
  FitnessEvaluator full(train, val, counter, 1);
  FitnessEvaluator surrogate(train, subsample(train, 8, 2), val, counter, 1);
  EvalBudgetCounter previous = counter;
  for (int i = 0; i < 200; ++i) {
    const FeatureMask m = random_mask(rng, 5, false);
    (rng.bernoulli(0.5) ? full : surrogate)(m);
    CHECK(counter.instances_processed >= previous.instances_processed);
    CHECK(counter.surrogate_evals >= previous.surrogate_evals);
    CHECK(counter.full_evals >= previous.full_evals);
    CHECK(counter.cache_hits >= previous.cache_hits);
    CHECK(counter.instances_processed == counter.surrogate_instances + counter.full_instances);
    previous = counter;
  }
}

TEST_CASE("exhaustive search bounds every mask's fitness") {
  Rng rng(21);
  const TableData train = random_table(rng, 40, 5, 2, 3);
  const TableData val = random_table(rng, 20, 5, 2, 3);
  EvalBudgetCounter counter;
  FitnessEvaluator eval(train, val, counter, 1);
  double best = 0.0;
  for (unsigned bits = 1; bits < 32; ++bits) {
    FeatureMask m(5);
    for (std::size_t i = 0; i < 5; ++i) m.set(i, (bits >> i) & 1u);
    best = std::max(best, eval(m));
  }
  for (int i = 0; i < 100; ++i) CHECK(eval(random_mask(rng, 5)) <= best);
  CHECK(counter.full_evals == 31);
}

TEST_CASE("holdout accuracy trains on all rows") {
  const TableData train = table({{0, 0}, {1, 0}, {2, 1}, {3, 1}});
  const TableData test = table({{0.2, 0}, {2.9, 1}, {1.4, 1}});
  CHECK(holdout_accuracy(train, test, FeatureMask::all(1)) == doctest::Approx(2.0 / 3.0));
}
