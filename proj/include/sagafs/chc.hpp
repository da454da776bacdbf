#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sagafs/data.hpp"
#include "sagafs/feature_mask.hpp"
#include "sagafs/report.hpp"
#include "sagafs/rng.hpp"

namespace sagafs {

struct ChcConfig {
  std::size_t pop_size = 40;
  std::size_t max_generations = 10000;
  std::size_t stagnation_limit = 10;
  double divergence_rate = 0.35;
  double init_inclusion_prob = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Member {
  FeatureMask mask;
  double fitness = 0.0;
  friend bool operator==(const Member&, const Member&) = default;
};

/// Members are kept ranked: best first.
struct Population {
  std::vector<Member> members;
  int incest_threshold = 0;
  std::size_t generation = 0;

  const Member& best() const { return members.front(); }
  friend bool operator==(const Population&, const Population&) = default;
};

/// Evaluates a mask; may repair an empty mask in place.
using FitnessFn = std::function<double(FeatureMask&)>;

enum class SeedMode {
  None,       // every bit drawn with the inclusion probability
  Migrant,    // p-1 random members plus the seed verbatim
  Frequency,  // seed verbatim, others drawn with p(bit) = ones(seed)/K
};

/// Survivor order: higher fitness, then fewer features, then lexicographic.
bool ranks_before(const Member& a, const Member& b);
void rank(std::vector<Member>& members);

Population init_population(std::size_t pop_size, std::size_t n_features, Rng& rng,
                           const FitnessFn& evaluate,
                           const std::optional<FeatureMask>& seed_mask = std::nullopt,
                           SeedMode mode = SeedMode::None, double inclusion_prob = 0.5);

/// HUX with incest prevention. Returns nullopt when d/2 <= threshold.
std::optional<std::pair<FeatureMask, FeatureMask>> hux_crossover(const FeatureMask& a,
                                                                 const FeatureMask& b,
                                                                 int incest_threshold, Rng& rng);

/// One CHC generation: random pairing, HUX, evaluation, (mu + lambda) truncation.
/// The incest threshold drops by one when no child survives.
Population step_generation(Population pop, const FitnessFn& evaluate, Rng& rng);

/// Keeps the best member; re-seeds every other one from it with bit flips.
Population cataclysm(Population pop, double divergence_rate, const FitnessFn& evaluate, Rng& rng);

int reset_threshold(double divergence_rate, std::size_t n_features);

struct GenerationInfo {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  bool improved = false;
  bool cataclysm = false;
  std::size_t stagnant = 0;
};

/// Called after every generation; returning true stops the run.
using GenerationObserver = std::function<bool(const Population&, const GenerationInfo&)>;

/// Runs generations until stagnation_limit generations pass without the best
/// fitness strictly improving, the observer asks to stop, or max_generations.
/// A cataclysm does not reset the stagnation count.
Population evolve(Population pop, const ChcConfig& cfg, const FitnessFn& evaluate, Rng& rng,
                  const GenerationObserver& observer = {});

/// Plain wrapper CHC over the full training split.
RunReport run_chc(const SplitData& split, const ChcConfig& cfg, const std::string& dataset_id = "");

}  // namespace sagafs
