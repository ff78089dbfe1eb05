// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "mio/numerics.hpp"
#include "mio/pairing.hpp"

namespace mio {

// Similarity applied to feature-vector pairs. dot reproduces the closed-form
// gradient analysis exactly; cosine is what training uses.
enum class SimilarityMode { dot, cosine };

struct LossConfig {
  double tau = 0.5;       // temperature, > 0
  double lambda = 0.0;    // pair-distance regularizer coefficient, >= 0
  SimilarityMode mode = SimilarityMode::cosine;
};

struct LossReport {
  double value = 0.0;
  // One row per feature vector (2N x D); empty for value-only evaluations.
  Mat grad_z;
  std::map<std::string, double> diagnostics;
};

// Binary pair-classification loss:
//   -(1/T_P) sum_pos log sigmoid(C/tau) - (1/T_N) sum_neg log sigmoid(-C/tau)
// over ordered pairs. N=1 has no negatives; that term is 0.
// z rows are feature vectors. In cosine mode every row norm must be > 1e-12.
LossReport mio_loss(const Mat& z, const PairIndexSet& pairs,
                    const LossConfig& cfg);

// mio_loss plus the full gradient: every appearance of a vector (anchor,
// positive partner, negative partner) contributes, including the
// normalization Jacobian in cosine mode.
LossReport mio_grad_z(const Mat& z, const PairIndexSet& pairs,
                      const LossConfig& cfg);

// Softmax contrastive baseline: per anchor, one positive against the 2N-2
// negatives plus the positive (2N-1 denominator terms), averaged over all
// 2N anchors, log-sum-exp stabilized. Requires N >= 2.
LossReport infonce_loss(const Mat& z, const PairIndexSet& pairs,
                        const LossConfig& cfg);

LossReport infonce_grad_z(const Mat& z, const PairIndexSet& pairs,
                          const LossConfig& cfg);

// lambda * sum over unordered positive pairs of |z_i - z_j|^2, with exact
// gradients on raw z (no similarity normalization involved).
LossReport l2_reg(const Mat& z, const PairIndexSet& pairs, double lambda);

// mio_grad_z plus l2_reg, exact sum of values and gradients.
LossReport mio_l2_loss(const Mat& z, const PairIndexSet& pairs,
                       const LossConfig& cfg);

// Influence of a pair on the projector: element m is
// (z_j)_m * |h_k|_1 + (z_k)_m * |h_j|_1. Symmetric in (j, k).
Vec influence_factor(const Vec& z_j, const Vec& z_k, const Vec& h_j,
                     const Vec& h_k);

// Closed-form projector-direction diagnostics. Both are defined only for
// dot mode at tau = 1 and reject any other configuration.
Vec projector_grad_mio(const Mat& z, const Mat& h, const PairIndexSet& pairs,
                       const LossConfig& cfg);

Vec projector_grad_infonce(const Mat& z, const Mat& h,
                           const PairIndexSet& pairs, const LossConfig& cfg);

}  // namespace mio
