// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mio/losses.hpp"
#include "mio/numerics.hpp"

namespace mio {

enum class Activation { identity, relu };
enum class Normalization { none, batch_standardize };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& s);
std::string normalization_name(Normalization n);
Normalization parse_normalization(const std::string& s);

// One multilayer perceptron: widths[0] inputs, one linear layer per
// subsequent width. Each layer applies linear -> normalization -> activation.
struct MlpSpec {
  std::vector<int> widths;
  std::vector<Activation> activations;      // one per layer
  std::vector<Normalization> normalizations;  // one per layer
  bool use_bias = true;

  int layers() const { return static_cast<int>(widths.size()) - 1; }
  void validate() const;  // ConfigError on any violation
};

// Encoder followed by projector; projector input width must equal encoder
// output width.
struct ModelSpec {
  MlpSpec encoder;
  MlpSpec projector;

  void validate() const;
  int input_dim() const { return encoder.widths.front(); }
  int feature_dim() const { return encoder.widths.back(); }
  int output_dim() const { return projector.widths.back(); }
};

// Hidden layers get ReLU plus `norm`; the final layer is always ReLU with no
// normalization, so encoder outputs are elementwise nonnegative.
MlpSpec make_encoder_spec(const std::vector<int>& widths, Normalization norm,
                          bool use_bias);

// Linear projector: identity activations throughout, `norm` on hidden layers
// only.
MlpSpec make_projector_spec(const std::vector<int>& widths, Normalization norm,
                            bool use_bias);

// Per-layer parameters, encoder then projector. Weight matrices are
// (out x in); bias vectors are empty when the owning MlpSpec disables bias.
// The same layout carries gradients and optimizer momentum.
struct ModelState {
  std::vector<Mat> enc_w;
  std::vector<Vec> enc_b;
  std::vector<Mat> proj_w;
  std::vector<Vec> proj_b;

  long long parameter_count() const;
};

ModelState zero_state(const ModelSpec& spec);

// Tensor views in a fixed order (encoder layers, then projector layers);
// bias views are present only when the owning spec keeps biases. Optimizers
// zip these across state/gradient/momentum instances.
std::vector<Mat*> weight_views(ModelState& s);
std::vector<const Mat*> weight_views(const ModelState& s);
std::vector<Vec*> bias_views(ModelState& s);
std::vector<const Vec*> bias_views(const ModelState& s);

// Everything backward needs. Layers are indexed through encoder then
// projector; act_in[l] is the activation input (post-normalization),
// act_out[l] the layer output. mean/inv_std are per-feature batch statistics,
// empty for layers without normalization.
struct ForwardTrace {
  Mat input;
  std::vector<Mat> act_in;
  std::vector<Mat> act_out;
  std::vector<Vec> mean;
  std::vector<Vec> inv_std;
  Mat h;  // encoder output, batch x feature_dim
  Mat z;  // projector output, batch x output_dim
};

// Deterministic forward pass. Batch standardization uses per-feature batch
// mean and biased variance with epsilon 1e-5 and no learned affine terms.
// When the encoder's final activation is ReLU, every h entry is checked
// nonnegative (this also trips on NaN from non-finite parameters).
ForwardTrace forward(const ModelState& state, const ModelSpec& spec,
                     const Mat& x);

// Exact parameter gradients for d(loss)/d(z) = grad_z, including the path
// through batch statistics. The trace must come from forward on the same
// state/spec/batch.
ModelState backward(const ModelState& state, const ModelSpec& spec,
                    const ForwardTrace& trace, const Mat& grad_z);

// He-scheme initialization: weights N(0, 2/fan_in) drawn row-major per layer
// (encoder layers first), biases zero.
ModelState init_params(const ModelSpec& spec, Rng& rng);

// Loss evaluated on projector outputs; grad_z is filled only when requested.
using LossClosure = std::function<LossReport(const Mat& z, bool want_grad)>;

struct AuditOptions {
  double step = 1e-5;      // central-difference step, in [1e-7, 1e-3]
  long long subset = 200;  // parameters sampled when the model has more
  std::uint64_t seed = 0;  // subset-sampling seed
};

struct AuditReport {
  double max_rel_err = 0.0;
  std::string worst_parameter;
  long long checked = 0;
};

// Central finite differences over every parameter (or a seed-deterministic
// subset of opt.subset parameters for larger models) against analytic
// backward gradients. Relative error uses denominator
// max(|analytic|, |numeric|, 1e-3) so near-zero gradients compare absolutely.
// analytic_override substitutes externally computed gradients; the audit must
// flag corrupted ones. AuditError on non-finite loss, naming the parameter.
AuditReport finite_diff_audit(const ModelState& state, const ModelSpec& spec,
                              const Mat& x, const LossClosure& loss,
                              const AuditOptions& opt = {},
                              const ModelState* analytic_override = nullptr);

struct Checkpoint {
  ModelSpec spec;
  ModelState state;
  std::uint64_t seed = 0;
};

// Versioned JSON document holding spec, seed, and row-major parameter arrays
// as decimal numbers that parse back to identical doubles. FormatError on
// unreadable, malformed, or shape-inconsistent files.
void save_checkpoint(const std::string& path, const ModelSpec& spec,
                     const ModelState& state, std::uint64_t seed);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mio
