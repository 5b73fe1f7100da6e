#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "binx/errors.hpp"

namespace binx {

using Mask = std::uint64_t;

// Hard ceiling on the number of features a bitmask can index.
inline constexpr int kMaxFeatures = 63;

// Default ceiling for dense 2^n enumeration (a table of 2^24 doubles is 128 MB).
inline constexpr int kDefaultExactCap = 24;

inline constexpr Mask low_bits(int m) {
  return m >= 64 ? ~Mask{0} : (Mask{1} << m) - 1;
}

// Places bit j of `idx` at the j-th set position of `positions`.
// Enumerating idx over [0, 2^popcount(positions)) walks all submasks of
// `positions` in a canonical order; every exact path in this library uses it
// so that sums accumulate in the same sequence everywhere.
inline Mask scatter_bits(Mask idx, Mask positions) {
  Mask out = 0;
  while (idx != 0) {
    const Mask lowest = positions & (~positions + 1);
    if (idx & 1) out |= lowest;
    positions ^= lowest;
    idx >>= 1;
  }
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// A subset of the features {0, ..., n-1}, stored as a bitmask plus the
// universe size it lives in. Feature indices are 0-based internally and
// 1-based in every file format and report.
struct FeatureSet {
  Mask bits = 0;
  int n = 0;

  FeatureSet() = default;
  FeatureSet(Mask bits_, int n_) : bits(bits_), n(n_) {
    if (n_ < 0 || n_ > kMaxFeatures) {
      throw argument_error("feature count out of range: " + std::to_string(n_));
    }
    if (bits_ & ~low_bits(n_)) {
      throw argument_error("subset has a bit set at position >= n");
    }
  }

  static FeatureSet empty(int n) { return FeatureSet(0, n); }
  static FeatureSet full(int n) { return FeatureSet(low_bits(n), n); }
  static FeatureSet single(int i, int n) { return FeatureSet(Mask{1} << i, n); }

  static FeatureSet of(std::initializer_list<int> indices, int n) {
    Mask m = 0;
    for (int i : indices) {
      if (i < 0 || i >= kMaxFeatures) {
        throw argument_error("feature index out of range: " + std::to_string(i));
      }
      m |= Mask{1} << i;
    }
    return FeatureSet(m, n);
  }

  int size() const { return std::popcount(bits); }
  bool contains(int i) const { return (bits >> i) & 1; }
  bool empty_set() const { return bits == 0; }
  bool subset_of(const FeatureSet& other) const { return (bits & ~other.bits) == 0; }
  Mask complement() const { return low_bits(n) & ~bits; }

  friend bool operator==(const FeatureSet& a, const FeatureSet& b) {
    return a.bits == b.bits && a.n == b.n;
  }

  // 0-based member indices, ascending.
  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Mask m = bits; m != 0; m &= m - 1) {
      out.push_back(std::countr_zero(m));
    }
    return out;
  }
};

// All masks S with 1 <= |S| <= max_order, sorted by (|S|, bits). This is the
// canonical entry layout of every interaction report. Walks each size class
// with Gosper's hack instead of filtering all 2^n masks.
inline std::vector<Mask> subsets_up_to_order(int n, int max_order) {
  std::vector<Mask> out;
  const Mask limit = Mask{1} << n;
  for (int size = 1; size <= max_order && size <= n; ++size) {
    for (Mask m = low_bits(size); m < limit;) {
      out.push_back(m);
      const Mask c = m & (~m + 1);
      const Mask r = m + c;
      if (r >= limit) break;
      m = r | (((r ^ m) >> 2) / c);
    }
  }
  return out;
}

}  // namespace binx
