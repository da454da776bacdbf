#include "sagafs/saga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sagafs/induction.hpp"

namespace sagafs {

std::vector<double> SamplingSchedule::fractions() const {
  std::vector<double> out;
  for (int i = levels; i >= 1; --i) out.push_back(std::pow(base, -i));
  return out;
}

SamplingSchedule build_schedule(std::size_t n, double a, int b) {
  if (b < 1) throw std::invalid_argument("build_schedule: need at least one level");
  if (!(a > 1.0)) throw std::invalid_argument("build_schedule: base must exceed 1");
  if (static_cast<double>(n) < std::pow(a, b)) {
    throw std::invalid_argument("build_schedule: N must be at least a^b");
  }
  SamplingSchedule s{a, b, {}};
  for (int i = b; i >= 1; --i) {
    const auto size = static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::pow(a, i)));
    s.sizes.push_back(std::max<std::size_t>(2, size));
  }
  return s;
}

void SagaConfig::validate() const {
  if (b < 1) throw std::invalid_argument("saga: b must be at least 1");
  if (!(a > 1.0)) throw std::invalid_argument("saga: a must exceed 1");
  if (!(pr > 0.0 && pr <= 1.0)) throw std::invalid_argument("saga: pr must lie in (0, 1]");
  if (z < 1) throw std::invalid_argument("saga: z must be at least 1");
  if (sp < 1) throw std::invalid_argument("saga: sp must be at least 1");
  if (p0 < 2) throw std::invalid_argument("saga: p0 must be at least 2");
  const double smallest = std::floor(static_cast<double>(p0) * std::pow(pr, b - 1) + 0.5);
  if (!strict_pseudocode_reduction && smallest < 2.0) {
    throw std::invalid_argument("saga: p0 * pr^(b-1) rounds below 2");
  }
  chc.validate();
}

std::size_t level_population(const SagaConfig& cfg, std::size_t reductions) {
  const double raw = static_cast<double>(cfg.p0) * std::pow(cfg.pr, static_cast<double>(reductions));
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(raw + 0.5)));
}

std::vector<std::size_t> population_schedule(const SagaConfig& cfg) {
  std::vector<std::size_t> sizes;
  std::size_t run = 0;
  for (int level = 0; level < cfg.b; ++level) {
    for (int rep = 0; rep < cfg.sp; ++rep, ++run) {
      sizes.push_back(level_population(cfg, cfg.strict_pseudocode_reduction
                                                 ? run
                                                 : static_cast<std::size_t>(level)));
    }
  }
  return sizes;
}

ControlDecision evolution_control_check(const FeatureMask& current_best, double previous_true,
                                        const FitnessFn& true_fitness) {
  FeatureMask mask = current_best;
  const double now = true_fitness(mask);
  // a plateau is not improvement
  return ControlDecision{now, !(now > previous_true)};
}

LevelOutcome run_level(const LevelState& state, std::size_t n_features,
                       const std::optional<FeatureMask>& incoming_best, const SagaConfig& cfg,
                       const FitnessFn& surrogate, const FitnessFn& true_fitness, Rng& rng,
                       const LevelHooks& hooks) {
  ChcConfig chc = cfg.chc;
  chc.pop_size = state.pop_size;
  const bool budget_mode = cfg.level_eval_budget > 0;
  if (budget_mode) chc.stagnation_limit = std::numeric_limits<std::size_t>::max();

  Population pop = init_population(state.pop_size, n_features, rng, surrogate, incoming_best,
                                   incoming_best ? SeedMode::Migrant : SeedMode::None,
                                   chc.init_inclusion_prob);

  LevelOutcome out;
  double previous = state.best_true_fitness;
  pop = evolve(std::move(pop), chc, surrogate, rng, [&](const Population& p, const GenerationInfo& info) {
    if (hooks.on_generation) hooks.on_generation(p, info);
    if (hooks.stop && hooks.stop()) return true;
    if (budget_mode || !cfg.fop || info.generation % cfg.z != 0) return false;

    const ControlDecision d = evolution_control_check(p.best().mask, previous, true_fitness);
    out.checkpoints.push_back(info.generation);
    out.last_true = d.new_true;
    if (hooks.on_checkpoint) hooks.on_checkpoint(info.generation, d.new_true);
    if (d.switch_level) {
      out.switched_by_control = true;
      return true;
    }
    previous = d.new_true;
    return false;
  });

  out.candidate = pop.best().mask;
  out.surrogate_fitness = pop.best().fitness;
  out.generations = pop.generation;
  return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Shared state of one SAGA run: the budget counter and the full-data evaluator
// are common to the surrogate and final stages.
class SagaRun {
 public:
  SagaRun(const SplitData& split, const SagaConfig& cfg, const std::string& dataset_id)
      : split_(split), cfg_(cfg) {
    cfg_.validate();
    report_.algorithm = cfg.so ? "saga_so" : "saga";
    report_.dataset_id = dataset_id;
    report_.run_seed = cfg.seed;
    report_.split_seed = split.split_seed;
    full_.emplace(split.train, split.validation, report_.budget, derive_seed(cfg.seed, 3));
  }

  double true_fitness(FeatureMask& mask) { return (*full_)(mask); }

  void record(std::uint64_t generation, double best, const char* stage) {
    report_.trace.push_back(TraceEvent{clock_.seconds(), report_.budget.instances_processed,
                                       report_.budget.surrogate_evals, report_.budget.full_evals,
                                       best, generation, stage});
  }

  void surrogate_stage() {
    const auto k = static_cast<std::size_t>(split_.train.n_features());
    const auto n = static_cast<std::size_t>(split_.train.n_instances());
    const SamplingSchedule schedule = build_schedule(n, cfg_.a, cfg_.b);
    const std::vector<std::size_t> pops = population_schedule(cfg_);
    const FitnessFn truth = [this](FeatureMask& m) { return true_fitness(m); };

    std::optional<FeatureMask> incumbent;
    double incumbent_true = kNegInf;
    std::uint64_t generation_clock = 0;
    std::size_t run = 0;

    for (int j = 0; j < cfg_.b; ++j) {
      const int level = cfg_.b - j;
      std::vector<std::pair<FeatureMask, double>> candidates;
      for (int rep = 0; rep < cfg_.sp; ++rep, ++run) {
        const std::uint64_t stream = 100 + 2 * static_cast<std::uint64_t>(run);
        LevelState state;
        state.level = level;
        state.sample = subsample(split_.train, schedule.sizes[static_cast<std::size_t>(j)],
                                 derive_seed(cfg_.seed, stream), level);
        state.pop_size = pops[run];
        state.best_true_fitness = incumbent_true;
        state.persev_remaining = cfg_.sp - rep;

        FitnessEvaluator surrogate_eval(split_.train, state.sample, split_.validation,
                                        report_.budget, derive_seed(cfg_.seed, 3));
        const FitnessFn surrogate = [&surrogate_eval](FeatureMask& m) { return surrogate_eval(m); };
        Rng rng(derive_seed(cfg_.seed, stream + 1));

        const std::uint64_t evals_at_start = report_.budget.surrogate_evals;
        LevelHooks hooks;
        hooks.on_checkpoint = [&](std::size_t generation, double) {
          if (incumbent) record(generation_clock + generation, incumbent_true, "surrogate");
        };
        if (cfg_.level_eval_budget > 0) {
          hooks.stop = [&] {
            return report_.budget.surrogate_evals - evals_at_start >= cfg_.level_eval_budget;
          };
        }
        const LevelOutcome outcome =
            run_level(state, k, incumbent, cfg_, surrogate, truth, rng, hooks);
        generation_clock += outcome.generations;

        FeatureMask candidate = outcome.candidate;
        const double candidate_true = true_fitness(candidate);
        report_.levels.push_back(LevelRecord{level, rep, state.sample.indices.size(), state.pop_size,
                                             outcome.generations, outcome.switched_by_control,
                                             outcome.surrogate_fitness, candidate_true, candidate});
        candidates.emplace_back(std::move(candidate), candidate_true);
      }

      // migrate the best by true fitness; the incumbent competes so migration never regresses
      if (incumbent) candidates.emplace_back(*incumbent, incumbent_true);
      const auto best = std::min_element(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
        return ranks_before(Member{x.first, x.second}, Member{y.first, y.second});
      });
      incumbent = best->first;
      incumbent_true = best->second;
      record(generation_clock, incumbent_true, "surrogate");
    }

    g_prime_ = *incumbent;
    g_prime_true_ = incumbent_true;
    report_.surrogate_best = g_prime_;
    report_.surrogate_best_true_fitness = g_prime_true_;
    report_.surrogate_stage_budget = report_.budget;
    report_.generations = generation_clock;
  }

  void final_stage() {
    const auto k = static_cast<std::size_t>(split_.train.n_features());
    const FitnessFn truth = [this](FeatureMask& m) { return true_fitness(m); };
    ChcConfig chc = cfg_.chc;
    chc.pop_size = cfg_.p0;
    Rng rng(derive_seed(cfg_.seed, 7));
    const std::uint64_t offset = report_.generations;

    Population pop = init_population(cfg_.p0, k, rng, truth, g_prime_, SeedMode::Frequency,
                                     chc.init_inclusion_prob);
    record(offset, std::max(pop.best().fitness, g_prime_true_), "final");
    pop = evolve(std::move(pop), chc, truth, rng, [&](const Population&, const GenerationInfo& info) {
      record(offset + info.generation, info.best_fitness, "final");
      return false;
    });
    report_.best_mask = pop.best().mask;
    report_.validation_accuracy = pop.best().fitness;
    report_.generations = offset + pop.generation;
  }

  void finish_surrogate_only() {
    report_.best_mask = g_prime_;
    report_.validation_accuracy = g_prime_true_;
  }

  RunReport finish() {
    report_.test_accuracy = holdout_accuracy(split_.train, split_.test, report_.best_mask);
    report_.elapsed_seconds = clock_.seconds();
    return report_;
  }

  const FeatureMask& g_prime() const { return g_prime_; }
  double g_prime_true() const { return g_prime_true_; }

 private:
  const SplitData& split_;
  SagaConfig cfg_;
  Stopwatch clock_;
  RunReport report_;
  std::optional<FitnessEvaluator> full_;
  FeatureMask g_prime_;
  double g_prime_true_ = kNegInf;
};

}  // namespace

SurrogateStageResult run_surrogate_stage(const SplitData& split, const SagaConfig& cfg,
                                         const std::string& dataset_id) {
  SagaRun run(split, cfg, dataset_id);
  run.surrogate_stage();
  run.finish_surrogate_only();
  SurrogateStageResult result{run.g_prime(), run.g_prime_true(), run.finish()};
  return result;
}

RunReport run_saga(const SplitData& split, const SagaConfig& cfg, const std::string& dataset_id) {
  SagaRun run(split, cfg, dataset_id);
  run.surrogate_stage();
  if (cfg.so) {
    run.finish_surrogate_only();
  } else {
    run.final_stage();
  }
  return run.finish();
}

std::vector<MatchResult> compare_runs(const std::vector<RunReport>& reference,
                                      const std::vector<RunReport>& baseline) {
  if (reference.size() != baseline.size()) {
    throw std::invalid_argument("compare_runs: run sets differ in size");
  }
  std::vector<MatchResult> out;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const RunReport& ref = reference[i];
    const RunReport& base = baseline[i];
    if (ref.dataset_id != base.dataset_id || ref.split_seed != base.split_seed) {
      throw std::invalid_argument("compare_runs: runs come from different datasets or splits");
    }
    MatchResult m;
    m.target = ref.validation_accuracy;
    for (std::size_t e = 0; e < base.trace.size(); ++e) {
      const TraceEvent& ev = base.trace[e];
      if (ev.best_true_fitness >= m.target) {
        m.matched = true;
        m.event_index = e;
        m.elapsed_seconds = ev.elapsed_seconds;
        m.instances_processed = ev.instances_processed;
        m.generation = ev.generation;
        break;
      }
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace sagafs
