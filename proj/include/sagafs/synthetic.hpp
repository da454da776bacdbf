#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sagafs/data.hpp"

namespace sagafs::synthetic {

/// Uniform [0, 1) features; the binary label is the majority vote of
/// (x_f > 0.5) over the informative features, then flipped with probability `noise`.
TableData planted(std::size_t n_rows, std::size_t n_features, const std::vector<std::size_t>& informative,
                  double noise, std::uint64_t seed);

/// A 366 x 34 six-class table shaped like the UCI dermatology data: 32 ordinal 0..3
/// clinical scores (half carry class signal, half are noise), a yes/no family-history
/// column, an age column with '?' gaps, and text class names.
RawTable dermatology_like(std::uint64_t seed);

}  // namespace sagafs::synthetic
