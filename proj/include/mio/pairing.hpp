// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mio/error.hpp"

namespace mio {

// Ordered positive/negative pair indices for a batch of N source samples
// with two views each. Views 2k and 2k+1 come from source sample k, so
// partner(i) = i ^ 1. Immutable after construction.
struct PairIndexSet {
  int n = 0;  // source batch size N; 2N view vectors total
  // All 2N ordered positive pairs (a, partner(a)).
  std::vector<std::pair<int, int>> positives;
  // For each anchor a in [0, 2N): ascending list of its 2N-2 negative
  // partners (every index except a and partner(a)).
  std::vector<std::vector<int>> negatives_by_anchor;
  long long t_p = 0;  // ordered positive count, 2N
  long long t_n = 0;  // ordered negative count, 4N^2 - 4N

  static int partner(int i) { return i ^ 1; }
};

PairIndexSet build_pairs(int n);

// Flags ordered negative pairs whose two views carry the same class label.
// Flattened anchor-major: entry index = anchor * (2N-2) + position in that
// anchor's negative list. labels has one class id per view (length 2N).
std::vector<std::uint8_t> false_negative_mask(const PairIndexSet& pairs,
                                              const std::vector<int>& labels);

}  // namespace mio
