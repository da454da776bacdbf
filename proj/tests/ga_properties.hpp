#pragma once

// Randomized GA invariants shared by the unit tests and the acceptance runner.
// Each check builds its own case from one seed and returns false on a violation.

#include <cstdint>
#include <string>
#include <vector>

#include "sagafs/chc.hpp"
#include "sagafs/induction.hpp"
#include "sagafs/saga.hpp"
#include "sagafs/synthetic.hpp"
#include "support.hpp"

namespace sagafs::testing {

struct Case {
  SplitData split;
  std::size_t k = 0;
};

inline Case random_case(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = 4 + rng.uniform_index(13);
  const auto n = static_cast<Eigen::Index>(30 + rng.uniform_index(60));
  const int classes = 2 + static_cast<int>(rng.uniform_index(3));
  const TableData t = random_table(rng, n, static_cast<Eigen::Index>(k), classes, 2 + static_cast<int>(rng.uniform_index(5)));
  return {shuffle_split(t, rng.next()), k};
}

/// Best fitness never drops and the population size never changes.
inline bool elitism_holds(std::uint64_t seed) {
  Case c = random_case(seed);
  Rng rng(derive_seed(seed, 1));
  EvalBudgetCounter counter;
  FitnessEvaluator eval(c.split.train, c.split.validation, counter, seed);
  const FitnessFn f = [&](FeatureMask& m) { return eval(m); };
  const std::size_t p = 2 + rng.uniform_index(20);
  ChcConfig cfg;
  cfg.pop_size = p;
  cfg.stagnation_limit = 1 + rng.uniform_index(15);
  Population pop = init_population(p, c.k, rng, f);
  double best = pop.best().fitness;
  bool ok = pop.members.size() == p;
  evolve(pop, cfg, f, rng, [&](const Population& now, const GenerationInfo& info) {
    ok = ok && now.members.size() == p && now.best().fitness >= best && info.best_fitness == now.best().fitness;
    best = now.best().fitness;
    for (const auto& m : now.members) ok = ok && !m.mask.empty_selection() && m.mask.size() == c.k;
    return false;
  });
  return ok;
}

/// HUX keeps the total disagreement and exchanges exactly floor(d/2) differing bits.
inline bool hux_preserves_disagreement(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = 1 + rng.uniform_index(64);
  const FeatureMask a = random_mask(rng, k, false);
  const FeatureMask b = random_mask(rng, k, false);
  const int threshold = static_cast<int>(rng.uniform_index(k / 4 + 2)) - 1;
  const std::size_t d = hamming(a, b);
  const auto kids = hux_crossover(a, b, threshold, rng);
  const bool should_mate = d > 0 && static_cast<long long>(d) > 2LL * threshold;
  if (!kids) return !should_mate;
  if (!should_mate) return false;
  const auto& [c1, c2] = *kids;
  if (hamming(c1, c2) != d) return false;
  if (hamming(c1, a) != d / 2 || hamming(c2, b) != d / 2) return false;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] == b[i] && (c1[i] != a[i] || c2[i] != a[i])) return false;
    if (a[i] != b[i] && c1[i] == c2[i]) return false;  // bits are swapped, never duplicated
  }
  return true;
}

/// The threshold drops by one exactly when the survivors are the parents.
inline bool threshold_rule_holds(std::uint64_t seed) {
  Case c = random_case(seed);
  Rng rng(derive_seed(seed, 2));
  EvalBudgetCounter counter;
  FitnessEvaluator eval(c.split.train, c.split.validation, counter, seed);
  const FitnessFn f = [&](FeatureMask& m) { return eval(m); };
  Population pop = init_population(2 + rng.uniform_index(20), c.k, rng, f);
  for (int g = 0; g < 30; ++g) {
    pop.incest_threshold = std::max(pop.incest_threshold, 0);
    const Population before = pop;
    pop = step_generation(pop, f, rng);
    const bool unchanged = pop.members == before.members;
    const int expected = unchanged ? before.incest_threshold - 1 : before.incest_threshold;
    if (pop.incest_threshold != expected || pop.generation != before.generation + 1) return false;
  }
  return true;
}

/// Every evaluated and returned mask is non-empty, even when empty draws are likely.
inline bool masks_non_empty(std::uint64_t seed) {
  Case c = random_case(seed);
  Rng rng(derive_seed(seed, 3));
  EvalBudgetCounter counter;
  FitnessEvaluator eval(c.split.train, c.split.validation, counter, seed);
  bool ok = true;
  const FitnessFn f = [&](FeatureMask& m) {
    const double v = eval(m);
    ok = ok && !m.empty_selection();
    return v;
  };
  ChcConfig cfg;
  cfg.pop_size = 2 + rng.uniform_index(10);
  cfg.init_inclusion_prob = 0.02;
  Population pop = init_population(cfg.pop_size, c.k, rng, f, std::nullopt, SeedMode::None, cfg.init_inclusion_prob);
  pop = evolve(pop, cfg, f, rng);
  for (const auto& m : pop.members) ok = ok && !m.mask.empty_selection();

  cfg.seed = seed;
  ok = ok && !run_chc(c.split, cfg).best_mask.empty_selection();
  return ok;
}

/// Identical split, config and seed give identical reports for CHC and SAGA.
inline bool runs_deterministic(std::uint64_t seed) {
  Case c = random_case(seed);
  ChcConfig chc;
  chc.pop_size = 10;
  chc.seed = seed;
  if (!same_outcome(run_chc(c.split, chc), run_chc(c.split, chc))) return false;

  SagaConfig saga;
  saga.seed = seed;
  saga.p0 = 10;
  saga.b = 2;
  saga.so = (seed % 2) == 0;
  return same_outcome(run_saga(c.split, saga), run_saga(c.split, saga));
}

}  // namespace sagafs::testing
