// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mio/model.hpp"
#include "mio/pairing.hpp"

namespace mio {

struct ProbeConfig {
  double lr0 = 0.01;
  double decay = 0.98;  // per-epoch exponential lr decay
  int epochs = 100;
  int batch_size = 32;
  int patience = 10;  // epochs without validation improvement before stopping
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError on any violation
};

struct ProbeReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  int epochs_run = 0;
  std::vector<double> val_accuracy;  // one entry per epoch run
};

// Encoder outputs h for the whole set in one pass, so batch-standardization
// statistics are the full-set statistics. Deterministic.
Mat extract_features(const ModelState& state, const ModelSpec& spec,
                     const Mat& x);

// Single linear layer + softmax cross-entropy trained by plain SGD with
// exponential lr decay, early-stopped on a seeded 10% validation split held
// out of the training rows. Reported accuracies come from the
// best-validation weights. DomainError unless the training rows contain at
// least two classes.
ProbeReport linear_probe(const Mat& train_x, const std::vector<int>& train_y,
                         const Mat& test_x, const std::vector<int>& test_y,
                         const ProbeConfig& cfg);

struct SimilarityStats {
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  double gap = 0.0;  // mean_pos - mean_neg
};

// Mean cosine similarity over ordered positive and ordered negative pairs.
// mean_neg is 0 when there are no negatives (N = 1).
SimilarityStats pairwise_similarity_stats(const Mat& z,
                                          const PairIndexSet& pairs);

}  // namespace mio
