// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/mi_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mio/error.hpp"

namespace mio {

namespace {

constexpr double kScoreFloor = 1e-300;

void check_scores(const DiscreteJoint& j, const Mat& scores) {
  if (scores.rows() != j.k() || scores.cols() != j.k())
    throw DimensionError("score table is " + std::to_string(scores.rows()) +
                         "x" + std::to_string(scores.cols()) + ", joint is " +
                         std::to_string(j.k()) + "x" + std::to_string(j.k()));
  if (!scores.allFinite() || (scores.array() <= 0.0).any())
    throw DomainError("scores must be finite and > 0");
}

}  // namespace

DiscreteJoint make_joint(const Mat& p) {
  if (p.rows() != p.cols() || p.rows() < 1)
    throw DomainError("joint must be a square matrix, got " +
                      std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
  if (!p.allFinite() || (p.array() < 0.0).any())
    throw DomainError("joint entries must be finite and >= 0");
  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(p.size()));
  for (Eigen::Index a = 0; a < p.rows(); ++a)
    for (Eigen::Index b = 0; b < p.cols(); ++b) cells.push_back(p(a, b));
  const double total = pairwise_sum(cells);
  if (std::abs(total - 1.0) > 1e-12)
    throw DomainError("joint entries sum to " + std::to_string(total) +
                      ", expected 1 within 1e-12");
  DiscreteJoint j;
  j.p_joint = p;
  j.p_marg.resize(p.rows());
  std::vector<double> row(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index a = 0; a < p.rows(); ++a) {
    for (Eigen::Index b = 0; b < p.cols(); ++b)
      row[static_cast<std::size_t>(b)] = p(a, b);
    j.p_marg(a) = pairwise_sum(row);
  }
  return j;
}

DiscreteJoint random_dirichlet_joint(int k, Rng& rng) {
  if (k < 1) throw DomainError("alphabet size must be >= 1, got " +
                               std::to_string(k));
  for (;;) {
    Mat cells(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        cells(a, b) = -std::log1p(-rng.uniform());  // Exp(1) draw
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) flat.push_back(cells(a, b));
    const double total = pairwise_sum(flat);
    if (total <= 0.0) continue;
    DiscreteJoint j = make_joint(cells / total);
    if ((j.p_marg.array() > 1e-12).all()) return j;
  }
}

double mutual_information(const DiscreteJoint& j) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(j.p_joint.size()));
  for (Eigen::Index a = 0; a < j.p_joint.rows(); ++a) {
    for (Eigen::Index b = 0; b < j.p_joint.cols(); ++b) {
      const double p = j.p_joint(a, b);
      if (p <= 0.0) continue;  // 0 ln 0 := 0
      terms.push_back(p * (std::log(p) - std::log(j.p_marg(a)) -
                           std::log(j.p_marg(b))));
    }
  }
  return pairwise_sum(terms);
}

Mat plug_in_scores(const DiscreteJoint& j) {
  if ((j.p_marg.array() <= 0.0).any())
    throw DomainError("plug-in scores need strictly positive marginals");
  Mat s(j.k(), j.k());
  for (Eigen::Index a = 0; a < s.rows(); ++a)
    for (Eigen::Index b = 0; b < s.cols(); ++b)
      s(a, b) = std::max(j.p_joint(a, b), kScoreFloor) /
                (j.p_marg(a) * j.p_marg(b));
  return s;
}

double expected_mio_loss(const DiscreteJoint& j, const Mat& scores) {
  check_scores(j, scores);
  std::vector<double> pos_terms, neg_terms;
  pos_terms.reserve(static_cast<std::size_t>(scores.size()));
  neg_terms.reserve(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index a = 0; a < scores.rows(); ++a) {
    for (Eigen::Index b = 0; b < scores.cols(); ++b) {
      const double x = std::log(scores(a, b));
      // ln(s/(1+s)) = -softplus(-x), ln(1/(1+s)) = -softplus(x)
      pos_terms.push_back(j.p_joint(a, b) * softplus(-x));
      neg_terms.push_back(j.p_marg(a) * j.p_marg(b) * softplus(x));
    }
  }
  return pairwise_sum(pos_terms) + pairwise_sum(neg_terms);
}

BoundReport verify_bound(const DiscreteJoint& j) {
  const Mat s = plug_in_scores(j);
  BoundReport r;
  r.loss = expected_mio_loss(j, s);
  r.i_pos = mutual_information(j);
  std::vector<double> tilde_terms;
  tilde_terms.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index a = 0; a < s.rows(); ++a)
    for (Eigen::Index b = 0; b < s.cols(); ++b)
      tilde_terms.push_back(j.p_marg(a) * j.p_marg(b) * std::log(s(a, b)));
  r.i_neg_tilde = pairwise_sum(tilde_terms);
  r.slack = r.loss - (-r.i_pos + r.i_neg_tilde);
  return r;
}

}  // namespace mio
