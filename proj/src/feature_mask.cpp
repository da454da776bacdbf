#include "sagafs/feature_mask.hpp"

#include <algorithm>
#include <stdexcept>

#include "sagafs/rng.hpp"

namespace sagafs {

FeatureMask FeatureMask::from_string(std::string_view bits) {
  FeatureMask mask(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      mask.bits_[i] = 1;
    } else if (bits[i] != '0') {
      throw std::invalid_argument("FeatureMask: expected only '0' or '1' characters");
    }
  }
  return mask;
}

std::size_t FeatureMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> FeatureMask::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

FeatureMask FeatureMask::complement() const {
  FeatureMask out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

std::string FeatureMask::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

std::size_t hamming(const FeatureMask& a, const FeatureMask& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: mask length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

bool repair_empty(FeatureMask& mask, Rng& rng) {
  if (mask.size() == 0 || !mask.empty_selection()) return false;
  mask.set(rng.uniform_index(mask.size()));
  return true;
}

bool parsimony_less(const FeatureMask& a, const FeatureMask& b) {
  const auto ca = a.count();
  const auto cb = b.count();
  if (ca != cb) return ca < cb;
  return a < b;
}

}  // namespace sagafs

std::size_t std::hash<sagafs::FeatureMask>::operator()(
    const sagafs::FeatureMask& mask) const noexcept {
  // FNV-1a over the bit bytes
  std::uint64_t h = 1469598103934665603ULL;
  for (auto b : mask.raw()) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h ^ mask.size());
}
