// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mio/losses.hpp"
#include "mio/pairing.hpp"

namespace mio {

namespace {

void check_aligned(const ModelState& a, const ModelState& b,
                   const ModelState& c) {
  auto same = [](const auto& x, const auto& y, const auto& z) {
    if (x.size() != y.size() || x.size() != z.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols() ||
          x[i].rows() != z[i].rows() || x[i].cols() != z[i].cols()) {
        return false;
      }
    }
    return true;
  };
  if (!same(a.enc_w, b.enc_w, c.enc_w) || !same(a.enc_b, b.enc_b, c.enc_b) ||
      !same(a.proj_w, b.proj_w, c.proj_w) ||
      !same(a.proj_b, b.proj_b, c.proj_b)) {
    throw DimensionError("optimizer step: state/grads/velocity shapes differ");
  }
}

// Fisher-Yates with the counter-based generator; deterministic per rng state.
std::vector<int> shuffled_indices(int n, Rng rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = std::min(
        i, static_cast<int>(rng.uniform() * static_cast<double>(i + 1)));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

LossReport eval_loss(LossKind kind, const Mat& z, const PairIndexSet& pairs,
                     const LossConfig& cfg) {
  switch (kind) {
    case LossKind::mio:
      return mio_grad_z(z, pairs, cfg);
    case LossKind::infonce:
      return infonce_grad_z(z, pairs, cfg);
    case LossKind::mio_l2:
      return mio_l2_loss(z, pairs, cfg);
  }
  throw ConfigError("unknown loss kind");
}

bool all_finite(const ModelState& s) {
  for (const Mat* w : weight_views(s)) {
    if (!w->allFinite()) return false;
  }
  for (const Vec* b : bias_views(s)) {
    if (!b->allFinite()) return false;
  }
  return true;
}

// Largest-magnitude pairwise dot similarity, for divergence diagnostics.
double extreme_similarity(const Mat& z) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < z.rows(); ++j) {
      const double s = z.row(i).dot(z.row(j));
      if (!std::isfinite(s)) return s;
      if (std::abs(s) > std::abs(worst)) worst = s;
    }
  }
  return worst;
}

[[noreturn]] void abort_divergent(int epoch, long long step, const Mat& z,
                                  const std::string& why) {
  std::ostringstream msg;
  msg << "pretrain: aborted at epoch " << epoch << " step " << step << ": "
      << why << "; extreme similarity " << extreme_similarity(z);
  throw DivergenceError(msg.str());
}

}  // namespace

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::lars ? "lars" : "sgd_momentum";
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "lars") return OptimizerKind::lars;
  if (s == "sgd_momentum") return OptimizerKind::sgd_momentum;
  throw ConfigError("unknown optimizer: " + s);
}

std::string loss_name(LossKind k) {
  switch (k) {
    case LossKind::mio:
      return "mio";
    case LossKind::infonce:
      return "infonce";
    default:
      return "mio_l2";
  }
}

LossKind parse_loss(const std::string& s) {
  if (s == "mio") return LossKind::mio;
  if (s == "infonce") return LossKind::infonce;
  if (s == "mio_l2") return LossKind::mio_l2;
  throw ConfigError("unknown loss: " + s);
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  if (schedule_horizon < 1) throw ConfigError("schedule_horizon must be >= 1");
  if (warmup_epochs >= schedule_horizon) {
    throw ConfigError("warmup_epochs must be < schedule_horizon");
  }
  if (epochs > schedule_horizon) {
    throw ConfigError("epochs must be <= schedule_horizon");
  }
  if (!(base_lr >= 0.0) || !std::isfinite(base_lr)) {
    throw ConfigError("base_lr must be finite and >= 0");
  }
  if (!(momentum >= 0.0) || momentum >= 1.0) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (!(trust_coefficient > 0.0)) {
    throw ConfigError("trust_coefficient must be > 0");
  }
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

double lr_at(const TrainConfig& cfg, double epoch) {
  cfg.validate();
  if (!(epoch >= 0.0) || epoch > static_cast<double>(cfg.schedule_horizon)) {
    throw DomainError("lr_at: epoch outside [0, schedule_horizon]");
  }
  const double w = static_cast<double>(cfg.warmup_epochs);
  if (epoch < w) return cfg.base_lr * (epoch + 1.0) / w;
  const double h = static_cast<double>(cfg.schedule_horizon);
  const double frac = (epoch - w) / (h - w);
  return cfg.base_lr * 0.5 * (1.0 + std::cos(M_PI * frac));
}

void sgd_step(ModelState& state, const ModelState& grads, double lr,
              double momentum, ModelState& velocity) {
  check_aligned(state, grads, velocity);
  auto sw = weight_views(state);
  auto gw = weight_views(grads);
  auto vw = weight_views(velocity);
  for (std::size_t i = 0; i < sw.size(); ++i) {
    *vw[i] = momentum * (*vw[i]) + (*gw[i]);
    *sw[i] -= lr * (*vw[i]);
  }
  auto sb = bias_views(state);
  auto gb = bias_views(grads);
  auto vb = bias_views(velocity);
  for (std::size_t i = 0; i < sb.size(); ++i) {
    *vb[i] = momentum * (*vb[i]) + (*gb[i]);
    *sb[i] -= lr * (*vb[i]);
  }
}

void lars_step(ModelState& state, const ModelState& grads, double lr,
               double momentum, double trust_coefficient,
               ModelState& velocity) {
  check_aligned(state, grads, velocity);
  auto sw = weight_views(state);
  auto gw = weight_views(grads);
  auto vw = weight_views(velocity);
  for (std::size_t i = 0; i < sw.size(); ++i) {
    const double wnorm = sw[i]->norm();
    const double gnorm = gw[i]->norm();
    const double local_lr =
        wnorm == 0.0 ? 1.0 : trust_coefficient * wnorm / (gnorm + 1e-12);
    *vw[i] = momentum * (*vw[i]) + (lr * local_lr) * (*gw[i]);
    *sw[i] -= *vw[i];
  }
  auto sb = bias_views(state);
  auto gb = bias_views(grads);
  auto vb = bias_views(velocity);
  for (std::size_t i = 0; i < sb.size(); ++i) {
    *vb[i] = momentum * (*vb[i]) + lr * (*gb[i]);
    *sb[i] -= *vb[i];
  }
}

PretrainResult pretrain(const TrainConfig& cfg, const ModelSpec& spec,
                        const VectorDataset& dataset,
                        const VectorViewKnobs& knobs,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  spec.validate();
  const int n = static_cast<int>(dataset.x.rows());
  if (n < 1) throw ConfigError("pretrain: dataset is empty");
  if (cfg.batch_size > n) {
    throw ConfigError("pretrain: batch_size exceeds dataset size");
  }
  if (dataset.x.cols() != spec.input_dim()) {
    throw DimensionError("pretrain: dataset width does not match encoder");
  }

  Rng init_rng(cfg.seed, 0);
  PretrainResult result{init_params(spec, init_rng), {}};
  ModelState velocity = zero_state(spec);
  const PairIndexSet pairs = build_pairs(cfg.batch_size);
  const LossConfig loss_cfg{cfg.tau, cfg.lambda, SimilarityMode::cosine};
  const int batches_per_epoch = n / cfg.batch_size;
  long long global_step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> order =
        shuffled_indices(n, Rng(cfg.seed, 1).split(
                                static_cast<std::uint64_t>(epoch)));
    const Rng aug_base =
        Rng(cfg.seed, 2).split(static_cast<std::uint64_t>(epoch));
    const double lr = lr_at(cfg, static_cast<double>(epoch));

    std::vector<double> losses, pos_sims, neg_sims;
    for (int b = 0; b < batches_per_epoch; ++b) {
      Mat batch(2 * cfg.batch_size, spec.input_dim());
      for (int k = 0; k < cfg.batch_size; ++k) {
        const int idx = order[static_cast<std::size_t>(b * cfg.batch_size + k)];
        const auto views = two_views_vector(
            dataset.x.row(idx).transpose(), knobs.noise_sigma,
            knobs.scale_range, knobs.dropout_p, aug_base,
            static_cast<std::uint64_t>(idx));
        batch.row(2 * k) = views.first.transpose();
        batch.row(2 * k + 1) = views.second.transpose();
      }

      ForwardTrace trace;
      LossReport rep;
      try {
        trace = forward(result.state, spec, batch);
        rep = eval_loss(cfg.loss, trace.z, pairs, loss_cfg);
      } catch (const DivergenceError&) {
        throw;
      } catch (const Error& e) {
        abort_divergent(epoch, global_step, trace.z.size() ? trace.z : batch,
                        e.what());
      }
      if (!std::isfinite(rep.value) || !rep.grad_z.allFinite()) {
        abort_divergent(epoch, global_step, trace.z, "non-finite loss");
      }
      const ModelState grads =
          backward(result.state, spec, trace, rep.grad_z);
      if (!all_finite(grads)) {
        abort_divergent(epoch, global_step, trace.z, "non-finite gradients");
      }

      if (cfg.optimizer == OptimizerKind::lars) {
        lars_step(result.state, grads, lr, cfg.momentum,
                  cfg.trust_coefficient, velocity);
      } else {
        sgd_step(result.state, grads, lr, cfg.momentum, velocity);
      }
      ++global_step;
      losses.push_back(rep.value);
      pos_sims.push_back(rep.diagnostics.at("mean_pos_sim"));
      neg_sims.push_back(rep.diagnostics.at("mean_neg_sim"));
    }

    MetricsRow row;
    row.epoch = epoch;
    row.step = global_step;
    const double nb = static_cast<double>(losses.size());
    row.loss = nb > 0 ? pairwise_sum(losses) / nb : 0.0;
    row.pos_sim = nb > 0 ? pairwise_sum(pos_sims) / nb : 0.0;
    row.neg_sim = nb > 0 ? pairwise_sum(neg_sims) / nb : 0.0;
    row.lr = lr;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.metrics.push_back(row);
    if (on_epoch) on_epoch(epoch, result.state, row);
  }
  return result;
}

}  // namespace mio
