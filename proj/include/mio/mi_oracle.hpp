// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mio/numerics.hpp"

namespace mio {

// Joint distribution of a pair of discrete variables on a shared alphabet.
// The marginal is taken as the row sums; no symmetry is assumed.
struct DiscreteJoint {
  Mat p_joint;  // k x k, entries >= 0, sums to 1 within 1e-12
  Vec p_marg;   // row sums
  int k() const { return static_cast<int>(p_joint.rows()); }
};

// Validates the matrix and derives the marginal.
DiscreteJoint make_joint(const Mat& p);

// Draws a joint from a flat Dirichlet over all k*k cells. Resamples in the
// (practically unreachable) case of a zero marginal.
DiscreteJoint random_dirichlet_joint(int k, Rng& rng);

struct BoundReport {
  double loss = 0.0;          // expected pair-classification loss, plug-in scores
  double i_pos = 0.0;         // dependence of the joint, in nats
  double i_neg_tilde = 0.0;   // product-measure log-ratio expectation, <= 0
  double slack = 0.0;         // loss - (-i_pos + i_neg_tilde), must be >= 0
};

// Sum over cells of p * ln(p / (marg_a * marg_b)), with 0 ln 0 := 0.
double mutual_information(const DiscreteJoint& j);

// Density-ratio scores p_joint / (marg_a * marg_b). Zero joint cells are
// floored at 1e-300 so downstream logs stay finite; marginals must be > 0.
Mat plug_in_scores(const DiscreteJoint& j);

// Exact enumeration of the binary pair-classification risk when positives
// are drawn from the joint and negatives from the product of marginals,
// scored by s: -E_joint[ln(s/(1+s))] - E_product[ln(1/(1+s))].
double expected_mio_loss(const DiscreteJoint& j, const Mat& scores);

// Evaluates the information inequality with plug-in scores and reports the
// components plus the slack.
BoundReport verify_bound(const DiscreteJoint& j);

}  // namespace mio
