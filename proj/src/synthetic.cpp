#include "sagafs/synthetic.hpp"

#include <array>
#include <stdexcept>
#include <string>

#include "sagafs/rng.hpp"

namespace sagafs::synthetic {

TableData planted(std::size_t n_rows, std::size_t n_features, const std::vector<std::size_t>& informative,
                  double noise, std::uint64_t seed) {
  if (informative.empty()) throw std::invalid_argument("planted: need informative features");
  for (auto f : informative) {
    if (f >= n_features) throw std::invalid_argument("planted: informative index out of range");
  }
  Rng rng(seed);
  TableData data;
  const auto n = static_cast<Eigen::Index>(n_rows);
  const auto k = static_cast<Eigen::Index>(n_features);
  data.features.resize(n, k);
  data.labels.resize(n);
  data.n_classes = 2;
  for (Eigen::Index c = 0; c < k; ++c) data.feature_names.push_back("x" + std::to_string(c));

  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) data.features(r, c) = rng.uniform01();
    std::size_t votes = 0;
    for (auto f : informative) votes += data.features(r, static_cast<Eigen::Index>(f)) > 0.5 ? 1 : 0;
    int label = 2 * votes > informative.size() ? 1 : 0;
    if (rng.bernoulli(noise)) label = 1 - label;
    data.labels[r] = label;
  }
  return data;
}

RawTable dermatology_like(std::uint64_t seed) {
  constexpr std::size_t kRows = 366;
  constexpr std::size_t kScores = 32;
  constexpr std::size_t kSignal = 16;  // scores 0..15 carry class signal
  const std::array<const char*, 6> classes{"psoriasis",          "seboreic_dermatitis",
                                           "lichen_planus",      "pityriasis_rosea",
                                           "chronic_dermatitis", "pityriasis_rubra_pilaris"};
  // class frequencies of the original data
  const std::array<std::size_t, 6> counts{112, 61, 72, 49, 52, 20};
  // three signature scores per class, drawn from the signal block with some overlap
  const std::array<std::array<std::size_t, 3>, 6> signature{{
      {0, 1, 2}, {3, 4, 1}, {5, 6, 7}, {8, 9, 4}, {10, 11, 12}, {13, 14, 15},
  }};

  Rng rng(seed);
  auto binomial = [&rng](int trials, double p) {
    int k = 0;
    for (int t = 0; t < trials; ++t) k += rng.bernoulli(p) ? 1 : 0;
    return k;
  };

  RawTable raw;
  for (std::size_t s = 0; s < kScores; ++s) raw.columns.push_back({"score" + std::to_string(s), ColumnKind::Numeric, {}});
  raw.columns.push_back({"family_history", ColumnKind::Categorical, {}});
  raw.columns.push_back({"age", ColumnKind::Numeric, {}});
  raw.columns.push_back({"class", ColumnKind::Categorical, {}});
  raw.target_column = raw.columns.size() - 1;

  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], c);
  rng.shuffle(std::span<std::size_t>(labels));

  for (std::size_t r = 0; r < kRows; ++r) {
    const std::size_t cls = labels[r];
    for (std::size_t s = 0; s < kScores; ++s) {
      int value = 0;
      if (s < kSignal) {
        const auto& sig = signature[cls];
        const bool on = s == sig[0] || s == sig[1] || s == sig[2];
        value = on ? 1 + binomial(2, 0.75) : binomial(3, 0.12);
      } else {
        value = binomial(3, 0.4);
      }
      raw.columns[s].cells.emplace_back(std::to_string(value));
    }
    const bool family = rng.bernoulli(cls == 0 ? 0.35 : 0.1);
    raw.columns[kScores].cells.emplace_back(family ? "yes" : "no");
    const int age = 8 + static_cast<int>(rng.uniform_index(68));
    if (rng.bernoulli(0.022)) {
      raw.columns[kScores + 1].cells.emplace_back(std::nullopt);
    } else {
      raw.columns[kScores + 1].cells.emplace_back(std::to_string(age));
    }
    raw.columns[kScores + 2].cells.emplace_back(classes[cls]);
  }
  return raw;
}

}  // namespace sagafs::synthetic
