// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mio/data.hpp"
#include "mio/model.hpp"

namespace mio {

enum class OptimizerKind { sgd_momentum, lars };
enum class LossKind { mio, infonce, mio_l2 };

std::string optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);
std::string loss_name(LossKind k);
LossKind parse_loss(const std::string& s);

struct TrainConfig {
  int batch_size = 128;
  int epochs = 100;
  double base_lr = 0.3;
  int warmup_epochs = 10;
  int schedule_horizon = 1000;
  OptimizerKind optimizer = OptimizerKind::lars;
  double momentum = 0.9;
  double trust_coefficient = 0.001;
  LossKind loss = LossKind::mio_l2;
  double tau = 0.5;
  double lambda = 1.0;
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError on any violation
};

// One row per epoch; seconds is wall-clock and is the only field that may
// differ between reruns of the same seed.
struct MetricsRow {
  int epoch = 0;
  long long step = 0;  // global optimizer steps completed
  double loss = 0.0;   // batch-averaged epoch loss
  double pos_sim = 0.0;
  double neg_sim = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

// Warmup: base_lr*(epoch+1)/warmup_epochs for epoch < warmup_epochs, then
// cosine base_lr*(1 + cos(pi*(epoch-warmup)/(horizon-warmup)))/2. Exact at
// the junction (both sides give base_lr), at the horizon (0), and at the
// cosine midpoint (base_lr/2). DomainError outside [0, horizon].
double lr_at(const TrainConfig& cfg, double epoch);

// v <- momentum*v + g; theta <- theta - lr*v, tensor by tensor.
void sgd_step(ModelState& state, const ModelState& grads, double lr,
              double momentum, ModelState& velocity);

// Layer-wise trust scaling on weight tensors:
//   local_lr = trust*|theta|/(|g| + 1e-12)   (1 when |theta| = 0)
//   v <- momentum*v + (lr*local_lr)*g; theta <- theta - v
// Bias tensors skip the trust ratio and use lr directly in the same
// lr-folded momentum form.
void lars_step(ModelState& state, const ModelState& grads, double lr,
               double momentum, double trust_coefficient,
               ModelState& velocity);

// Per-epoch view-noise knobs for the vector augmentation pipeline.
struct VectorViewKnobs {
  double noise_sigma = 0.5;
  double scale_range = 0.2;
  double dropout_p = 0.0;
};

struct PretrainResult {
  ModelState state;
  std::vector<MetricsRow> metrics;
};

using EpochCallback =
    std::function<void(int epoch, const ModelState&, const MetricsRow&)>;

// Self-supervised loop: per epoch a seed-deterministic shuffle, per batch two
// augmented views per sample (rows 2k, 2k+1), forward, loss gradient,
// backward, optimizer step at lr_at(cfg, epoch). Batches that would be
// partial are dropped so the pair structure stays fixed. Fully reproducible
// per seed apart from MetricsRow.seconds. DivergenceError (naming epoch,
// step, and the extreme similarity) if loss or gradients go non-finite;
// parameters are never updated from non-finite gradients.
PretrainResult pretrain(const TrainConfig& cfg, const ModelSpec& spec,
                        const VectorDataset& dataset,
                        const VectorViewKnobs& knobs,
                        const EpochCallback& on_epoch = nullptr);

}  // namespace mio
