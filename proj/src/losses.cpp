// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mio/error.hpp"

namespace mio {

namespace {

void check_config(const LossConfig& cfg) {
  if (!std::isfinite(cfg.tau) || cfg.tau <= 0.0)
    throw ConfigError("tau must be finite and > 0, got " +
                      std::to_string(cfg.tau));
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0)
    throw ConfigError("lambda must be finite and >= 0, got " +
                      std::to_string(cfg.lambda));
}

void check_batch(const Mat& z, const PairIndexSet& pairs) {
  if (z.rows() != 2 * static_cast<Eigen::Index>(pairs.n))
    throw DimensionError("feature batch has " + std::to_string(z.rows()) +
                         " rows, pair index set expects " +
                         std::to_string(2 * pairs.n));
  if (z.cols() < 1) throw DimensionError("feature vectors must be non-empty");
  if (!z.allFinite()) throw DomainError("feature batch contains non-finite values");
}

// Precomputed pairwise similarities. C is symmetric; the diagonal is the
// self-similarity and is never consumed by any loss term.
struct SimCache {
  Mat c;
  Vec norm;   // row norms (cosine mode only)
  Mat unit;   // row-normalized z (cosine mode only)
};

SimCache build_sim(const Mat& z, SimilarityMode mode) {
  const Eigen::Index rows = z.rows();
  SimCache s;
  if (mode == SimilarityMode::cosine) {
    s.norm.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double n = l2_norm(z.row(i).transpose());
      if (n <= 1e-12)
        throw DomainError("row " + std::to_string(i) +
                          " is degenerate (norm <= 1e-12)");
      s.norm(i) = n;
    }
    s.unit = z.array().colwise() / s.norm.array();
  }
  const Mat& basis = (mode == SimilarityMode::cosine) ? s.unit : z;
  s.c.resize(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = i; j < rows; ++j) {
      double v = dot(basis.row(i).transpose(), basis.row(j).transpose());
      if (mode == SimilarityMode::cosine) v = std::min(1.0, std::max(-1.0, v));
      s.c(i, j) = v;
      s.c(j, i) = v;
    }
  }
  return s;
}

// Chain rule for one ordered pair (a, b) with weight w = dL/dC(a,b).
// dot:    dC/dz_a = z_b
// cosine: dC/dz_a = (unit_b - C * unit_a) / |z_a|   (orthogonal to z_a)
void accumulate_pair_grad(Mat& grad, const Mat& z, const SimCache& s,
                          SimilarityMode mode, int a, int b, double w) {
  if (mode == SimilarityMode::dot) {
    grad.row(a) += w * z.row(b);
    grad.row(b) += w * z.row(a);
  } else {
    const double c = s.c(a, b);
    grad.row(a) += (w / s.norm(a)) * (s.unit.row(b) - c * s.unit.row(a));
    grad.row(b) += (w / s.norm(b)) * (s.unit.row(a) - c * s.unit.row(b));
  }
}

// Shared forward pass. Positive / negative contribution lists are kept in a
// fixed anchor-major order so reductions are reproducible bit for bit.
LossReport mio_eval(const Mat& z, const PairIndexSet& pairs,
                    const LossConfig& cfg, bool with_grad) {
  check_config(cfg);
  check_batch(z, pairs);
  const SimCache s = build_sim(z, cfg.mode);
  const int rows = 2 * pairs.n;

  std::vector<double> pos_terms, neg_terms, pos_sims, neg_sims;
  pos_terms.reserve(static_cast<std::size_t>(pairs.t_p));
  pos_sims.reserve(static_cast<std::size_t>(pairs.t_p));
  neg_terms.reserve(static_cast<std::size_t>(pairs.t_n));
  neg_sims.reserve(static_cast<std::size_t>(pairs.t_n));
  for (int a = 0; a < rows; ++a) {
    const int p = PairIndexSet::partner(a);
    pos_terms.push_back(log_sigmoid(s.c(a, p) / cfg.tau));
    pos_sims.push_back(s.c(a, p));
    for (int j : pairs.negatives_by_anchor[static_cast<std::size_t>(a)]) {
      neg_terms.push_back(log_sigmoid(-s.c(a, j) / cfg.tau));
      neg_sims.push_back(s.c(a, j));
    }
  }

  LossReport r;
  const double pos_part =
      -pairwise_sum(pos_terms) / static_cast<double>(pairs.t_p);
  const double neg_part =
      pairs.t_n > 0 ? -pairwise_sum(neg_terms) / static_cast<double>(pairs.t_n)
                    : 0.0;
  r.value = pos_part + neg_part;
  r.diagnostics["pos_term_mean"] = pos_part;
  r.diagnostics["neg_term_mean"] = neg_part;
  r.diagnostics["mean_pos_sim"] =
      pairwise_sum(pos_sims) / static_cast<double>(pairs.t_p);
  r.diagnostics["mean_neg_sim"] =
      pairs.t_n > 0 ? pairwise_sum(neg_sims) / static_cast<double>(pairs.t_n)
                    : 0.0;

  if (with_grad) {
    r.grad_z = Mat::Zero(rows, z.cols());
    for (int a = 0; a < rows; ++a) {
      const int p = PairIndexSet::partner(a);
      // d/dC of -log sigmoid(C/tau), scaled by the ordered-pair count.
      const double wp = -(1.0 - sigmoid(s.c(a, p) / cfg.tau)) /
                        (static_cast<double>(pairs.t_p) * cfg.tau);
      accumulate_pair_grad(r.grad_z, z, s, cfg.mode, a, p, wp);
      for (int j : pairs.negatives_by_anchor[static_cast<std::size_t>(a)]) {
        const double wn = sigmoid(s.c(a, j) / cfg.tau) /
                          (static_cast<double>(pairs.t_n) * cfg.tau);
        accumulate_pair_grad(r.grad_z, z, s, cfg.mode, a, j, wn);
      }
    }
  }
  return r;
}

LossReport infonce_eval(const Mat& z, const PairIndexSet& pairs,
                        const LossConfig& cfg, bool with_grad) {
  check_config(cfg);
  if (pairs.n < 2)
    throw DomainError("softmax contrastive loss needs at least 2 sources, got " +
                      std::to_string(pairs.n));
  check_batch(z, pairs);
  const SimCache s = build_sim(z, cfg.mode);
  const int rows = 2 * pairs.n;

  LossReport r;
  std::vector<double> anchor_losses(static_cast<std::size_t>(rows));
  std::vector<double> pos_sims, neg_sims;
  pos_sims.reserve(static_cast<std::size_t>(rows));
  neg_sims.reserve(static_cast<std::size_t>(pairs.t_n));
  if (with_grad) r.grad_z = Mat::Zero(rows, z.cols());

  std::vector<int> others(static_cast<std::size_t>(rows) - 1);
  std::vector<double> scaled(others.size()), shifted(others.size());
  for (int a = 0; a < rows; ++a) {
    const int p = PairIndexSet::partner(a);
    int k = 0;
    for (int i = 0; i < rows; ++i)
      if (i != a) others[static_cast<std::size_t>(k++)] = i;
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < others.size(); ++t) {
      scaled[t] = s.c(a, others[t]) / cfg.tau;
      m = std::max(m, scaled[t]);
    }
    for (std::size_t t = 0; t < others.size(); ++t)
      shifted[t] = std::exp(scaled[t] - m);
    const double lse = m + std::log(pairwise_sum(shifted));
    anchor_losses[static_cast<std::size_t>(a)] = lse - s.c(a, p) / cfg.tau;
    pos_sims.push_back(s.c(a, p));
    for (int j : pairs.negatives_by_anchor[static_cast<std::size_t>(a)])
      neg_sims.push_back(s.c(a, j));

    if (with_grad) {
      for (std::size_t t = 0; t < others.size(); ++t) {
        const int i = others[t];
        const double soft = std::exp(scaled[t] - lse);
        const double w = (soft - (i == p ? 1.0 : 0.0)) /
                         (static_cast<double>(rows) * cfg.tau);
        accumulate_pair_grad(r.grad_z, z, s, cfg.mode, a, i, w);
      }
    }
  }

  r.value = pairwise_sum(anchor_losses) / static_cast<double>(rows);
  r.diagnostics["anchor_loss_mean"] = r.value;
  r.diagnostics["mean_pos_sim"] =
      pairwise_sum(pos_sims) / static_cast<double>(pairs.t_p);
  r.diagnostics["mean_neg_sim"] =
      pairwise_sum(neg_sims) / static_cast<double>(pairs.t_n);
  return r;
}

void check_projector_inputs(const Mat& z, const Mat& h,
                            const PairIndexSet& pairs, const LossConfig& cfg) {
  if (cfg.mode != SimilarityMode::dot || cfg.tau != 1.0)
    throw UnsupportedError(
        "projector direction is derived for dot similarity at tau = 1 only");
  check_config(cfg);
  check_batch(z, pairs);
  if (h.rows() != z.rows())
    throw DimensionError("pre-projection batch has " + std::to_string(h.rows()) +
                         " rows, expected " + std::to_string(z.rows()));
  if (!h.allFinite())
    throw DomainError("pre-projection batch contains non-finite values");
}

}  // namespace

LossReport mio_loss(const Mat& z, const PairIndexSet& pairs,
                    const LossConfig& cfg) {
  return mio_eval(z, pairs, cfg, false);
}

LossReport mio_grad_z(const Mat& z, const PairIndexSet& pairs,
                      const LossConfig& cfg) {
  return mio_eval(z, pairs, cfg, true);
}

LossReport infonce_loss(const Mat& z, const PairIndexSet& pairs,
                        const LossConfig& cfg) {
  return infonce_eval(z, pairs, cfg, false);
}

LossReport infonce_grad_z(const Mat& z, const PairIndexSet& pairs,
                          const LossConfig& cfg) {
  return infonce_eval(z, pairs, cfg, true);
}

LossReport l2_reg(const Mat& z, const PairIndexSet& pairs, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw DomainError("lambda must be finite and >= 0, got " +
                      std::to_string(lambda));
  check_batch(z, pairs);
  LossReport r;
  r.grad_z = Mat::Zero(z.rows(), z.cols());
  std::vector<double> terms(static_cast<std::size_t>(pairs.n));
  for (int k = 0; k < pairs.n; ++k) {
    const Vec d = (z.row(2 * k) - z.row(2 * k + 1)).transpose();
    terms[static_cast<std::size_t>(k)] = dot(d, d);
    r.grad_z.row(2 * k) += 2.0 * lambda * d.transpose();
    r.grad_z.row(2 * k + 1) -= 2.0 * lambda * d.transpose();
  }
  r.value = lambda * pairwise_sum(terms);
  r.diagnostics["mean_pair_sq_dist"] =
      pairwise_sum(terms) / static_cast<double>(pairs.n);
  return r;
}

LossReport mio_l2_loss(const Mat& z, const PairIndexSet& pairs,
                       const LossConfig& cfg) {
  LossReport r = mio_eval(z, pairs, cfg, true);
  LossReport reg = l2_reg(z, pairs, cfg.lambda);
  r.value += reg.value;
  r.grad_z += reg.grad_z;
  r.diagnostics["l2_value"] = reg.value;
  return r;
}

Vec influence_factor(const Vec& z_j, const Vec& z_k, const Vec& h_j,
                     const Vec& h_k) {
  if (z_j.size() != z_k.size())
    throw DimensionError("projected vectors differ in length: " +
                         std::to_string(z_j.size()) + " vs " +
                         std::to_string(z_k.size()));
  if (h_j.size() != h_k.size())
    throw DimensionError("pre-projection vectors differ in length: " +
                         std::to_string(h_j.size()) + " vs " +
                         std::to_string(h_k.size()));
  return z_j * l1_norm(h_k) + z_k * l1_norm(h_j);
}

Vec projector_grad_mio(const Mat& z, const Mat& h, const PairIndexSet& pairs,
                       const LossConfig& cfg) {
  check_projector_inputs(z, h, pairs, cfg);
  const SimCache s = build_sim(z, SimilarityMode::dot);
  const int rows = 2 * pairs.n;
  Vec total = Vec::Zero(z.cols());
  for (int a = 0; a < rows; ++a) {
    const int p = PairIndexSet::partner(a);
    const Vec q_pos = influence_factor(z.row(a).transpose(),
                                       z.row(p).transpose(),
                                       h.row(a).transpose(),
                                       h.row(p).transpose());
    Vec term = (1.0 - sigmoid(s.c(a, p))) * q_pos;
    const auto& negs = pairs.negatives_by_anchor[static_cast<std::size_t>(a)];
    if (!negs.empty()) {
      Vec neg_sum = Vec::Zero(z.cols());
      for (int j : negs) {
        const Vec q = influence_factor(z.row(a).transpose(),
                                       z.row(j).transpose(),
                                       h.row(a).transpose(),
                                       h.row(j).transpose());
        neg_sum += sigmoid(s.c(a, j)) * q;
      }
      term -= neg_sum / static_cast<double>(pairs.t_p - 2);
    }
    total += term;
  }
  return -total / static_cast<double>(pairs.t_p);
}

Vec projector_grad_infonce(const Mat& z, const Mat& h,
                           const PairIndexSet& pairs, const LossConfig& cfg) {
  check_projector_inputs(z, h, pairs, cfg);
  const SimCache s = build_sim(z, SimilarityMode::dot);
  const int rows = 2 * pairs.n;
  Vec total = Vec::Zero(z.cols());
  for (int a = 0; a < rows; ++a) {
    const int p = PairIndexSet::partner(a);
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i)
      if (i != a) m = std::max(m, s.c(a, i));
    double denom = 0.0;
    Vec weighted = Vec::Zero(z.cols());
    for (int i = 0; i < rows; ++i) {
      if (i == a) continue;
      const double w = std::exp(s.c(a, i) - m);
      const Vec q = influence_factor(z.row(a).transpose(),
                                     z.row(i).transpose(),
                                     h.row(a).transpose(),
                                     h.row(i).transpose());
      denom += w;
      weighted += w * q;
    }
    const Vec q_pos = influence_factor(z.row(a).transpose(),
                                       z.row(p).transpose(),
                                       h.row(a).transpose(),
                                       h.row(p).transpose());
    total += q_pos - weighted / denom;
  }
  return -total / static_cast<double>(rows);
}

}  // namespace mio
