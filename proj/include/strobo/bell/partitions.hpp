#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "strobo/errors.hpp"

namespace strobo {

/// One monomial of the partial Bell polynomial B_{j,m}: x_1^{b_1} ... x_r^{b_r}
/// with r = j - m + 1, sum b_i = m, sum i*b_i = j.
struct PartitionTerm {
  std::vector<unsigned> counts;
  /// j! / (prod b_i! * prod (i!)^{b_i}); the number of set partitions of
  /// {1..j} with b_i blocks of size i.
  std::uint64_t coefficient = 0;

  friend bool operator==(const PartitionTerm&, const PartitionTerm&) = default;
};

namespace detail {

inline std::uint64_t factorial_u64(unsigned n) {
  std::uint64_t f = 1;
  for (unsigned q = 2; q <= n; ++q) f *= q;
  return f;
}

inline void enumerate_counts(unsigned i, unsigned r, unsigned blocks_left, unsigned size_left,
                             std::vector<unsigned>& counts, std::vector<std::vector<unsigned>>& out) {
  if (i > r) {
    if (blocks_left == 0 && size_left == 0) out.push_back(counts);
    return;
  }
  for (unsigned b = 0; b <= blocks_left && b * i <= size_left; ++b) {
    counts[i - 1] = b;
    enumerate_counts(i + 1, r, blocks_left - b, size_left - b * i, counts, out);
  }
  counts[i - 1] = 0;
}

}  // namespace detail

/// All monomials of B_{j,m} in ascending lexicographic order of (b_1, ..., b_r).
/// Coefficients are exact; j is limited to 20 so j! fits in 64 bits.
inline std::vector<PartitionTerm> enumerate_partitions(unsigned j, unsigned m) {
  if (m < 1 || m > j) {
    throw StructuralError("partial Bell polynomial needs 1 <= m <= j (got j=" + std::to_string(j) +
                          ", m=" + std::to_string(m) + ")");
  }
  if (j > 20) throw StructuralError("partition coefficients overflow beyond j = 20");
  const unsigned r = j - m + 1;
  std::vector<unsigned> counts(r, 0);
  std::vector<std::vector<unsigned>> all;
  detail::enumerate_counts(1, r, m, j, counts, all);

  std::vector<PartitionTerm> terms;
  terms.reserve(all.size());
  for (auto& b : all) {
    // Divide step by step; every intermediate quotient is an integer because
    // it counts partitions of a prefix of the blocks.
    std::uint64_t coeff = detail::factorial_u64(j);
    for (unsigned i = 1; i <= r; ++i) {
      for (unsigned q = 0; q < b[i - 1]; ++q) coeff /= detail::factorial_u64(i);
    }
    for (unsigned i = 1; i <= r; ++i) coeff /= detail::factorial_u64(b[i - 1]);
    terms.push_back({std::move(b), coeff});
  }
  return terms;
}

}  // namespace strobo
