#pragma once

#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sagafs/data.hpp"
#include "sagafs/feature_mask.hpp"
#include "sagafs/rng.hpp"

namespace sagafs::testing {

/// Builds a table from row literals; the last value of every row is the class id.
inline TableData table(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto width = static_cast<Eigen::Index>(rows.begin()->size());
  TableData t;
  t.features.resize(n, width - 1);
  t.labels.resize(n);
  Eigen::Index i = 0;
  int max_label = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) {
      if (j + 1 < width) {
        t.features(i, j) = v;
      } else {
        t.labels(i) = static_cast<int>(v);
        max_label = std::max(max_label, t.labels(i));
      }
      ++j;
    }
    ++i;
  }
  t.n_classes = std::max(2, max_label + 1);
  for (Eigen::Index j = 0; j + 1 < width; ++j) t.feature_names.push_back("f" + std::to_string(j));
  return t;
}

/// Random table with small-integer features (so ties and duplicates occur) and random labels.
inline TableData random_table(Rng& rng, Eigen::Index n, Eigen::Index k, int classes, int levels = 5) {
  TableData t;
  t.features.resize(n, k);
  t.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) t.features(i, j) = static_cast<double>(rng.uniform_index(levels));
    t.labels(i) = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
  }
  t.n_classes = classes;
  for (Eigen::Index j = 0; j < k; ++j) t.feature_names.push_back("f" + std::to_string(j));
  return t;
}

inline FeatureMask random_mask(Rng& rng, std::size_t k, bool non_empty = true) {
  FeatureMask m(k);
  do {
    for (std::size_t i = 0; i < k; ++i) m.set(i, rng.bernoulli(0.5));
  } while (non_empty && m.empty_selection());
  return m;
}

inline RawTable parse(const std::string& text, const std::string& target) {
  std::istringstream in(text);
  return parse_csv(in, target);
}

}  // namespace sagafs::testing
