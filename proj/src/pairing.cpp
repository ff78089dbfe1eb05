// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/pairing.hpp"

#include <string>

namespace mio {

PairIndexSet build_pairs(int n) {
  if (n < 1) throw DomainError("build_pairs: batch size must be >= 1");
  PairIndexSet ps;
  ps.n = n;
  const int m = 2 * n;
  ps.positives.reserve(static_cast<std::size_t>(m));
  ps.negatives_by_anchor.resize(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    ps.positives.emplace_back(a, PairIndexSet::partner(a));
    auto& negs = ps.negatives_by_anchor[static_cast<std::size_t>(a)];
    negs.reserve(static_cast<std::size_t>(m - 2));
    for (int j = 0; j < m; ++j)
      if (j != a && j != PairIndexSet::partner(a)) negs.push_back(j);
  }
  ps.t_p = static_cast<long long>(m);
  ps.t_n = 4LL * n * n - 4LL * n;
  return ps;
}

std::vector<std::uint8_t> false_negative_mask(const PairIndexSet& pairs,
                                              const std::vector<int>& labels) {
  const std::size_t m = static_cast<std::size_t>(2 * pairs.n);
  if (labels.size() != m)
    throw DimensionError("false_negative_mask: expected " + std::to_string(m) +
                         " labels, got " + std::to_string(labels.size()));
  std::vector<std::uint8_t> mask;
  mask.reserve(static_cast<std::size_t>(pairs.t_n));
  for (std::size_t a = 0; a < m; ++a)
    for (int j : pairs.negatives_by_anchor[a])
      mask.push_back(labels[a] == labels[static_cast<std::size_t>(j)] ? 1 : 0);
  return mask;
}

}  // namespace mio
