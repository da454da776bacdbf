#include "sagafs/chc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sagafs/induction.hpp"

namespace sagafs {

void ChcConfig::validate() const {
  if (pop_size < 2) throw std::invalid_argument("chc: population size must be at least 2");
  if (!(divergence_rate > 0.0 && divergence_rate < 1.0)) {
    throw std::invalid_argument("chc: divergence rate must lie in (0, 1)");
  }
  if (!(init_inclusion_prob >= 0.0 && init_inclusion_prob <= 1.0)) {
    throw std::invalid_argument("chc: inclusion probability must lie in [0, 1]");
  }
  if (stagnation_limit < 1) throw std::invalid_argument("chc: stagnation limit must be positive");
}

bool ranks_before(const Member& a, const Member& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return parsimony_less(a.mask, b.mask);
}

void rank(std::vector<Member>& members) {
  std::stable_sort(members.begin(), members.end(), ranks_before);
}

namespace {

FeatureMask random_mask(std::size_t n_features, double p, Rng& rng) {
  FeatureMask mask(n_features);
  for (std::size_t i = 0; i < n_features; ++i) {
    if (rng.bernoulli(p)) mask.set(i);
  }
  repair_empty(mask, rng);
  return mask;
}

Member evaluated(FeatureMask mask, const FitnessFn& evaluate) {
  const double f = evaluate(mask);
  return Member{std::move(mask), f};
}

}  // namespace

Population init_population(std::size_t pop_size, std::size_t n_features, Rng& rng,
                           const FitnessFn& evaluate, const std::optional<FeatureMask>& seed_mask,
                           SeedMode mode, double inclusion_prob) {
  if (pop_size < 2) throw std::invalid_argument("init_population: population size must be at least 2");
  if (mode != SeedMode::None) {
    if (!seed_mask) throw std::invalid_argument("init_population: seed mode requires a seed mask");
    if (seed_mask->size() != n_features) {
      throw std::invalid_argument("init_population: seed mask length differs from feature count");
    }
  }

  Population pop;
  pop.incest_threshold = static_cast<int>(n_features / 4);
  pop.members.reserve(pop_size);

  std::size_t random_members = pop_size;
  double p = inclusion_prob;
  if (mode != SeedMode::None) {
    FeatureMask seed = *seed_mask;
    repair_empty(seed, rng);
    pop.members.push_back(evaluated(std::move(seed), evaluate));
    random_members = pop_size - 1;
    if (mode == SeedMode::Frequency) {
      p = static_cast<double>(seed_mask->count()) / static_cast<double>(n_features);
    }
  }
  for (std::size_t i = 0; i < random_members; ++i) {
    pop.members.push_back(evaluated(random_mask(n_features, p, rng), evaluate));
  }
  rank(pop.members);
  return pop;
}

std::optional<std::pair<FeatureMask, FeatureMask>> hux_crossover(const FeatureMask& a,
                                                                 const FeatureMask& b,
                                                                 int incest_threshold, Rng& rng) {
  const std::size_t d = hamming(a, b);
  // mate only when d/2 > threshold
  if (static_cast<long long>(d) <= 2LL * incest_threshold || d == 0) return std::nullopt;

  std::vector<std::size_t> differing;
  differing.reserve(d);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) differing.push_back(i);
  }
  const std::size_t swaps = d / 2;
  for (std::size_t i = 0; i < swaps; ++i) {
    std::swap(differing[i], differing[i + rng.uniform_index(differing.size() - i)]);
  }

  std::pair<FeatureMask, FeatureMask> children{a, b};
  for (std::size_t i = 0; i < swaps; ++i) {
    const std::size_t pos = differing[i];
    children.first.set(pos, b[pos]);
    children.second.set(pos, a[pos]);
  }
  return children;
}

Population step_generation(Population pop, const FitnessFn& evaluate, Rng& rng) {
  const std::size_t p = pop.members.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<Member> children;
  for (std::size_t i = 0; i + 1 < p; i += 2) {
    const auto& mom = pop.members[order[i]].mask;
    const auto& dad = pop.members[order[i + 1]].mask;
    auto kids = hux_crossover(mom, dad, pop.incest_threshold, rng);
    if (!kids) continue;
    repair_empty(kids->first, rng);
    repair_empty(kids->second, rng);
    children.push_back(evaluated(std::move(kids->first), evaluate));
    children.push_back(evaluated(std::move(kids->second), evaluate));
  }

  // parents first, so a stable sort lets parents win exact ties against children
  struct Tagged {
    Member member;
    bool child;
  };
  std::vector<Tagged> pool;
  pool.reserve(p + children.size());
  for (auto& m : pop.members) pool.push_back({std::move(m), false});
  for (auto& m : children) pool.push_back({std::move(m), true});
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Tagged& a, const Tagged& b) { return ranks_before(a.member, b.member); });

  bool child_survived = false;
  pop.members.clear();
  for (std::size_t i = 0; i < p; ++i) {
    child_survived = child_survived || pool[i].child;
    pop.members.push_back(std::move(pool[i].member));
  }
  if (!child_survived) --pop.incest_threshold;
  ++pop.generation;
  return pop;
}

int reset_threshold(double divergence_rate, std::size_t n_features) {
  return static_cast<int>(
      std::floor(divergence_rate * (1.0 - divergence_rate) * static_cast<double>(n_features)));
}

Population cataclysm(Population pop, double divergence_rate, const FitnessFn& evaluate, Rng& rng) {
  const Member best = pop.best();
  const std::size_t k = best.mask.size();
  const std::size_t p = pop.members.size();
  pop.members.clear();
  pop.members.push_back(best);
  for (std::size_t i = 1; i < p; ++i) {
    FeatureMask mask = best.mask;
    for (std::size_t j = 0; j < k; ++j) {
      if (rng.bernoulli(divergence_rate)) mask.flip(j);
    }
    repair_empty(mask, rng);
    pop.members.push_back(evaluated(std::move(mask), evaluate));
  }
  rank(pop.members);
  pop.incest_threshold = reset_threshold(divergence_rate, k);
  return pop;
}

Population evolve(Population pop, const ChcConfig& cfg, const FitnessFn& evaluate, Rng& rng,
                  const GenerationObserver& observer) {
  cfg.validate();
  double best_so_far = pop.best().fitness;
  std::size_t stagnant = 0;
  while (pop.generation < cfg.max_generations) {
    pop = step_generation(std::move(pop), evaluate, rng);
    bool reinitialized = false;
    if (pop.incest_threshold < 0) {
      pop = cataclysm(std::move(pop), cfg.divergence_rate, evaluate, rng);
      reinitialized = true;
    }
    const bool improved = pop.best().fitness > best_so_far;
    if (improved) {
      best_so_far = pop.best().fitness;
      stagnant = 0;
    } else {
      ++stagnant;  // cataclysms neither reset nor pause the count
    }
    const GenerationInfo info{pop.generation, best_so_far, improved, reinitialized, stagnant};
    if (observer && observer(pop, info)) break;
    if (stagnant >= cfg.stagnation_limit) break;
  }
  return pop;
}

RunReport run_chc(const SplitData& split, const ChcConfig& cfg, const std::string& dataset_id) {
  cfg.validate();
  const Stopwatch clock;
  RunReport report;
  report.algorithm = "chc";
  report.dataset_id = dataset_id;
  report.run_seed = cfg.seed;
  report.split_seed = split.split_seed;

  const auto k = static_cast<std::size_t>(split.train.n_features());
  FitnessEvaluator full(split.train, split.validation, report.budget, derive_seed(cfg.seed, 2));
  const FitnessFn evaluate = [&full](FeatureMask& m) { return full(m); };
  Rng rng(derive_seed(cfg.seed, 1));

  auto record = [&](std::size_t generation, double best) {
    report.trace.push_back(TraceEvent{clock.seconds(), report.budget.instances_processed,
                                      report.budget.surrogate_evals, report.budget.full_evals, best,
                                      generation, "chc"});
  };

  Population pop = init_population(cfg.pop_size, k, rng, evaluate, std::nullopt, SeedMode::None,
                                   cfg.init_inclusion_prob);
  record(0, pop.best().fitness);
  pop = evolve(std::move(pop), cfg, evaluate, rng, [&](const Population&, const GenerationInfo& info) {
    record(info.generation, info.best_fitness);
    return false;
  });

  report.best_mask = pop.best().mask;
  report.validation_accuracy = pop.best().fitness;
  report.generations = pop.generation;
  report.test_accuracy = holdout_accuracy(split.train, split.test, report.best_mask);
  report.elapsed_seconds = clock.seconds();
  return report;
}

}  // namespace sagafs
