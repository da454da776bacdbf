#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sagafs {

class Rng;

/// A candidate feature subset: one bit per feature, 1 = selected.
class FeatureMask {
 public:
  FeatureMask() = default;
  explicit FeatureMask(std::size_t n_features, bool value = false)
      : bits_(n_features, value ? 1 : 0) {}

  /// Parses a string of '0'/'1' characters; index 0 is the first character.
  static FeatureMask from_string(std::string_view bits);
  static FeatureMask all(std::size_t n_features) { return FeatureMask(n_features, true); }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty_selection() const noexcept { return count() == 0; }
  std::size_t count() const noexcept;

  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  bool test(std::size_t i) const { return bits_.at(i) != 0; }
  void set(std::size_t i, bool value = true) { bits_.at(i) = value ? 1 : 0; }
  void flip(std::size_t i) { bits_.at(i) ^= 1; }

  std::vector<std::size_t> selected() const;
  FeatureMask complement() const;
  std::string to_string() const;

  const std::vector<std::uint8_t>& raw() const noexcept { return bits_; }

  /// Lexicographic order on the bit string ('0' < '1').
  friend auto operator<=>(const FeatureMask&, const FeatureMask&) = default;
  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Number of differing bits. Throws std::invalid_argument on length mismatch.
std::size_t hamming(const FeatureMask& a, const FeatureMask& b);

/// Sets one uniformly chosen bit if no bit is set. Returns true if a repair happened.
bool repair_empty(FeatureMask& mask, Rng& rng);

/// Parsimony-aware ordering used for every deterministic tie-break:
/// fewer selected features first, then the lexicographically smaller bit string.
bool parsimony_less(const FeatureMask& a, const FeatureMask& b);

}  // namespace sagafs

template <>
struct std::hash<sagafs::FeatureMask> {
  std::size_t operator()(const sagafs::FeatureMask& mask) const noexcept;
};
