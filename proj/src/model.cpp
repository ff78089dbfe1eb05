// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mio {

namespace {

constexpr double kStandardizeEps = 1e-5;

void check_state_shapes(const ModelState& state, const ModelSpec& spec) {
  auto check_mlp = [](const std::vector<Mat>& w, const std::vector<Vec>& b,
                      const MlpSpec& mlp, const char* which) {
    const int layers = mlp.layers();
    if (static_cast<int>(w.size()) != layers ||
        static_cast<int>(b.size()) != layers) {
      throw DimensionError(std::string(which) + ": layer count mismatch");
    }
    for (int l = 0; l < layers; ++l) {
      if (w[l].rows() != mlp.widths[l + 1] || w[l].cols() != mlp.widths[l]) {
        throw DimensionError(std::string(which) + ": weight shape mismatch");
      }
      const Eigen::Index want_b = mlp.use_bias ? mlp.widths[l + 1] : 0;
      if (b[l].size() != want_b) {
        throw DimensionError(std::string(which) + ": bias shape mismatch");
      }
    }
  };
  check_mlp(state.enc_w, state.enc_b, spec.encoder, "encoder state");
  check_mlp(state.proj_w, state.proj_b, spec.projector, "projector state");
}

struct LayerRef {
  const Mat* w;
  const Vec* b;  // nullptr when bias disabled
  Activation act;
  Normalization norm;
};

std::vector<LayerRef> layer_sequence(const ModelState& state,
                                     const ModelSpec& spec) {
  std::vector<LayerRef> seq;
  auto push = [&seq](const std::vector<Mat>& w, const std::vector<Vec>& b,
                     const MlpSpec& mlp) {
    for (int l = 0; l < mlp.layers(); ++l) {
      seq.push_back({&w[l], mlp.use_bias ? &b[l] : nullptr,
                     mlp.activations[l], mlp.normalizations[l]});
    }
  };
  push(state.enc_w, state.enc_b, spec.encoder);
  push(state.proj_w, state.proj_b, spec.projector);
  return seq;
}

// Flat parameter addressing for the audit: tensors in view order, entries
// row-major within each tensor.
struct ParamBlock {
  double* data;
  Eigen::Index rows, cols;  // cols = 1 for biases
  std::string tag;
};

std::vector<ParamBlock> param_blocks(ModelState& s, const ModelSpec& spec) {
  std::vector<ParamBlock> blocks;
  auto add = [&blocks](std::vector<Mat>& w, std::vector<Vec>& b, bool bias,
                       const char* prefix) {
    for (std::size_t l = 0; l < w.size(); ++l) {
      std::ostringstream wt;
      wt << prefix << ".w[" << l << "]";
      blocks.push_back({w[l].data(), w[l].rows(), w[l].cols(), wt.str()});
      if (bias) {
        std::ostringstream bt;
        bt << prefix << ".b[" << l << "]";
        blocks.push_back({b[l].data(), b[l].size(), 1, bt.str()});
      }
    }
  };
  add(s.enc_w, s.enc_b, spec.encoder.use_bias, "encoder");
  add(s.proj_w, s.proj_b, spec.projector.use_bias, "projector");
  return blocks;
}

struct ParamAddress {
  double* slot;
  std::string name;
};

// Entry `flat` in row-major order across blocks. Eigen matrices are
// column-major in memory, so the row-major entry (r, c) lives at c*rows + r.
ParamAddress locate_param(std::vector<ParamBlock>& blocks, long long flat) {
  for (auto& blk : blocks) {
    const long long n = static_cast<long long>(blk.rows) * blk.cols;
    if (flat < n) {
      const Eigen::Index r = static_cast<Eigen::Index>(flat / blk.cols);
      const Eigen::Index c = static_cast<Eigen::Index>(flat % blk.cols);
      std::ostringstream name;
      name << blk.tag << "(" << r;
      if (blk.cols > 1) name << "," << c;
      name << ")";
      return {blk.data + c * blk.rows + r, name.str()};
    }
    flat -= n;
  }
  throw DomainError("finite_diff_audit: parameter index out of range");
}

nlohmann::json mlp_to_json(const MlpSpec& mlp) {
  nlohmann::json j;
  j["widths"] = mlp.widths;
  std::vector<std::string> acts, norms;
  for (auto a : mlp.activations) acts.push_back(activation_name(a));
  for (auto n : mlp.normalizations) norms.push_back(normalization_name(n));
  j["activations"] = acts;
  j["normalizations"] = norms;
  j["bias"] = mlp.use_bias;
  return j;
}

MlpSpec mlp_from_json(const nlohmann::json& j) {
  MlpSpec mlp;
  mlp.widths = j.at("widths").get<std::vector<int>>();
  for (const auto& s : j.at("activations")) {
    mlp.activations.push_back(parse_activation(s.get<std::string>()));
  }
  for (const auto& s : j.at("normalizations")) {
    mlp.normalizations.push_back(parse_normalization(s.get<std::string>()));
  }
  mlp.use_bias = j.at("bias").get<bool>();
  return mlp;
}

nlohmann::json params_to_json(const std::vector<Mat>& w,
                              const std::vector<Vec>& b) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t l = 0; l < w.size(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < w[l].rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < w[l].cols(); ++c) row.push_back(w[l](r, c));
      rows.push_back(std::move(row));
    }
    nlohmann::json layer;
    layer["w"] = std::move(rows);
    nlohmann::json bias = nlohmann::json::array();
    for (Eigen::Index i = 0; i < b[l].size(); ++i) bias.push_back(b[l](i));
    layer["b"] = std::move(bias);
    arr.push_back(std::move(layer));
  }
  return arr;
}

void params_from_json(const nlohmann::json& arr, const MlpSpec& mlp,
                      std::vector<Mat>& w, std::vector<Vec>& b,
                      const char* which) {
  if (static_cast<int>(arr.size()) != mlp.layers()) {
    throw FormatError(std::string("checkpoint: ") + which +
                      " layer count does not match spec");
  }
  w.clear();
  b.clear();
  for (int l = 0; l < mlp.layers(); ++l) {
    const auto& layer = arr.at(l);
    const auto& rows = layer.at("w");
    const int out = mlp.widths[l + 1];
    const int in = mlp.widths[l];
    if (static_cast<int>(rows.size()) != out) {
      throw FormatError(std::string("checkpoint: ") + which +
                        " weight row count does not match spec");
    }
    Mat wm(out, in);
    for (int r = 0; r < out; ++r) {
      const auto& row = rows.at(r);
      if (static_cast<int>(row.size()) != in) {
        throw FormatError(std::string("checkpoint: ") + which +
                          " weight column count does not match spec");
      }
      for (int c = 0; c < in; ++c) wm(r, c) = row.at(c).get<double>();
    }
    const auto& bias = layer.at("b");
    const int want_b = mlp.use_bias ? out : 0;
    if (static_cast<int>(bias.size()) != want_b) {
      throw FormatError(std::string("checkpoint: ") + which +
                        " bias length does not match spec");
    }
    Vec bv(want_b);
    for (int i = 0; i < want_b; ++i) bv(i) = bias.at(i).get<double>();
    w.push_back(std::move(wm));
    b.push_back(std::move(bv));
  }
}

}  // namespace

std::string activation_name(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw ConfigError("unknown activation: " + s);
}

std::string normalization_name(Normalization n) {
  return n == Normalization::batch_standardize ? "batch_standardize" : "none";
}

Normalization parse_normalization(const std::string& s) {
  if (s == "batch_standardize") return Normalization::batch_standardize;
  if (s == "none") return Normalization::none;
  throw ConfigError("unknown normalization: " + s);
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw ConfigError("mlp spec needs at least 1 layer");
  for (int wd : widths) {
    if (wd < 1) throw ConfigError("mlp spec: widths must be positive");
  }
  const auto n_layers = widths.size() - 1;
  if (activations.size() != n_layers) {
    throw ConfigError("mlp spec: one activation per layer required");
  }
  if (normalizations.size() != n_layers) {
    throw ConfigError("mlp spec: one normalization per layer required");
  }
}

void ModelSpec::validate() const {
  encoder.validate();
  projector.validate();
  if (encoder.widths.back() != projector.widths.front()) {
    throw ConfigError(
        "projector input width must equal encoder output width");
  }
}

MlpSpec make_encoder_spec(const std::vector<int>& widths, Normalization norm,
                          bool use_bias) {
  MlpSpec mlp;
  mlp.widths = widths;
  mlp.use_bias = use_bias;
  const int layers = static_cast<int>(widths.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    mlp.activations.push_back(Activation::relu);
    mlp.normalizations.push_back(l + 1 < layers ? norm : Normalization::none);
  }
  mlp.validate();
  return mlp;
}

MlpSpec make_projector_spec(const std::vector<int>& widths, Normalization norm,
                            bool use_bias) {
  MlpSpec mlp;
  mlp.widths = widths;
  mlp.use_bias = use_bias;
  const int layers = static_cast<int>(widths.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    mlp.activations.push_back(Activation::identity);
    mlp.normalizations.push_back(l + 1 < layers ? norm : Normalization::none);
  }
  mlp.validate();
  return mlp;
}

long long ModelState::parameter_count() const {
  long long n = 0;
  for (const auto& w : enc_w) n += w.size();
  for (const auto& b : enc_b) n += b.size();
  for (const auto& w : proj_w) n += w.size();
  for (const auto& b : proj_b) n += b.size();
  return n;
}

ModelState zero_state(const ModelSpec& spec) {
  spec.validate();
  ModelState s;
  auto fill = [](const MlpSpec& mlp, std::vector<Mat>& w, std::vector<Vec>& b) {
    for (int l = 0; l < mlp.layers(); ++l) {
      w.push_back(Mat::Zero(mlp.widths[l + 1], mlp.widths[l]));
      b.push_back(Vec::Zero(mlp.use_bias ? mlp.widths[l + 1] : 0));
    }
  };
  fill(spec.encoder, s.enc_w, s.enc_b);
  fill(spec.projector, s.proj_w, s.proj_b);
  return s;
}

std::vector<Mat*> weight_views(ModelState& s) {
  std::vector<Mat*> v;
  for (auto& w : s.enc_w) v.push_back(&w);
  for (auto& w : s.proj_w) v.push_back(&w);
  return v;
}

std::vector<const Mat*> weight_views(const ModelState& s) {
  std::vector<const Mat*> v;
  for (const auto& w : s.enc_w) v.push_back(&w);
  for (const auto& w : s.proj_w) v.push_back(&w);
  return v;
}

std::vector<Vec*> bias_views(ModelState& s) {
  std::vector<Vec*> v;
  for (auto& b : s.enc_b) {
    if (b.size() > 0) v.push_back(&b);
  }
  for (auto& b : s.proj_b) {
    if (b.size() > 0) v.push_back(&b);
  }
  return v;
}

std::vector<const Vec*> bias_views(const ModelState& s) {
  std::vector<const Vec*> v;
  for (const auto& b : s.enc_b) {
    if (b.size() > 0) v.push_back(&b);
  }
  for (const auto& b : s.proj_b) {
    if (b.size() > 0) v.push_back(&b);
  }
  return v;
}

ForwardTrace forward(const ModelState& state, const ModelSpec& spec,
                     const Mat& x) {
  spec.validate();
  check_state_shapes(state, spec);
  if (x.rows() < 1 || x.cols() != spec.encoder.widths.front()) {
    throw DimensionError("forward: batch shape does not match encoder input");
  }

  const auto seq = layer_sequence(state, spec);
  ForwardTrace trace;
  trace.input = x;
  Mat cur = x;
  for (const auto& layer : seq) {
    Mat a = cur * layer.w->transpose();
    if (layer.b != nullptr) a.rowwise() += layer.b->transpose();
    Vec mean, inv_std;
    if (layer.norm == Normalization::batch_standardize) {
      mean = a.colwise().mean().transpose();
      const Mat centered = a.rowwise() - mean.transpose();
      const Vec var =
          centered.cwiseProduct(centered).colwise().mean().transpose();
      inv_std = (var.array() + kStandardizeEps).sqrt().inverse().matrix();
      a = (centered.array().rowwise() * inv_std.transpose().array()).matrix();
    }
    trace.mean.push_back(std::move(mean));
    trace.inv_std.push_back(std::move(inv_std));
    trace.act_in.push_back(a);
    if (layer.act == Activation::relu) a = a.cwiseMax(0.0);
    trace.act_out.push_back(a);
    cur = std::move(a);
  }

  const int enc_layers = spec.encoder.layers();
  trace.h = trace.act_out[enc_layers - 1];
  trace.z = trace.act_out.back();
  if (spec.encoder.activations.back() == Activation::relu &&
      !(trace.h.array() >= 0.0).all()) {
    throw DomainError("forward: encoder output has negative or non-finite entries");
  }
  return trace;
}

ModelState backward(const ModelState& state, const ModelSpec& spec,
                    const ForwardTrace& trace, const Mat& grad_z) {
  spec.validate();
  check_state_shapes(state, spec);
  const auto seq = layer_sequence(state, spec);
  const int total = static_cast<int>(seq.size());
  if (static_cast<int>(trace.act_in.size()) != total ||
      static_cast<int>(trace.act_out.size()) != total ||
      trace.input.cols() != spec.encoder.widths.front()) {
    throw DimensionError("backward: trace does not match spec");
  }
  const Eigen::Index batch = trace.input.rows();
  for (int l = 0; l < total; ++l) {
    if (trace.act_out[l].rows() != batch ||
        trace.act_out[l].cols() != seq[l].w->rows()) {
      throw DimensionError("backward: trace does not match state");
    }
  }
  if (grad_z.rows() != batch || grad_z.cols() != trace.z.cols()) {
    throw DimensionError("backward: grad_z shape does not match trace");
  }

  ModelState grads = zero_state(spec);
  std::vector<Mat*> gw = weight_views(grads);
  auto grad_bias = [&grads, &spec](int l) -> Vec* {
    const int enc_layers = spec.encoder.layers();
    if (l < enc_layers) {
      return spec.encoder.use_bias ? &grads.enc_b[l] : nullptr;
    }
    return spec.projector.use_bias ? &grads.proj_b[l - enc_layers] : nullptr;
  };

  Mat g = grad_z;
  for (int l = total - 1; l >= 0; --l) {
    const auto& layer = seq[l];
    if (layer.act == Activation::relu) {
      g.array() *= (trace.act_in[l].array() > 0.0).cast<double>();
    }
    if (layer.norm == Normalization::batch_standardize) {
      // d/da of (a - mean) * inv_std with biased batch variance:
      //   inv_std/B * (B*g - sum_b g - xhat * sum_b(g*xhat))
      const Mat& xhat = trace.act_in[l];
      const double b = static_cast<double>(batch);
      const Eigen::RowVectorXd sum_g = g.colwise().sum();
      const Eigen::RowVectorXd sum_gx = g.cwiseProduct(xhat).colwise().sum();
      Mat adj = b * g;
      adj.rowwise() -= sum_g;
      adj.array() -= xhat.array().rowwise() * sum_gx.array();
      g = (adj.array().rowwise() *
           (trace.inv_std[l].transpose().array() / b))
              .matrix();
    }
    const Mat& layer_in = (l == 0) ? trace.input : trace.act_out[l - 1];
    *gw[l] = g.transpose() * layer_in;
    if (Vec* gb = grad_bias(l)) *gb = g.colwise().sum().transpose();
    if (l > 0) g = g * (*layer.w);
  }
  return grads;
}

ModelState init_params(const ModelSpec& spec, Rng& rng) {
  ModelState s = zero_state(spec);
  for (Mat* w : weight_views(s)) {
    const double sigma = std::sqrt(2.0 / static_cast<double>(w->cols()));
    for (Eigen::Index r = 0; r < w->rows(); ++r) {
      for (Eigen::Index c = 0; c < w->cols(); ++c) {
        (*w)(r, c) = rng.gaussian(0.0, sigma);
      }
    }
  }
  return s;
}

AuditReport finite_diff_audit(const ModelState& state, const ModelSpec& spec,
                              const Mat& x, const LossClosure& loss,
                              const AuditOptions& opt,
                              const ModelState* analytic_override) {
  if (!(opt.step >= 1e-7 && opt.step <= 1e-3)) {
    throw DomainError("finite_diff_audit: step must lie in [1e-7, 1e-3]");
  }
  if (opt.subset < 1) {
    throw DomainError("finite_diff_audit: subset must be positive");
  }

  const ForwardTrace base_trace = forward(state, spec, x);
  const LossReport base = loss(base_trace.z, true);
  if (!std::isfinite(base.value)) {
    throw AuditError("finite_diff_audit: non-finite loss at baseline");
  }
  ModelState analytic = analytic_override
                            ? *analytic_override
                            : backward(state, spec, base_trace, base.grad_z);
  check_state_shapes(analytic, spec);

  ModelState work = state;
  std::vector<ParamBlock> blocks = param_blocks(work, spec);
  std::vector<ParamBlock> analytic_blocks = param_blocks(analytic, spec);
  const long long total = work.parameter_count();

  std::vector<long long> chosen;
  if (total <= opt.subset) {
    chosen.resize(static_cast<std::size_t>(total));
    for (long long i = 0; i < total; ++i) chosen[static_cast<std::size_t>(i)] = i;
  } else {
    // Floyd's sampling: subset distinct indices, deterministic per seed.
    Rng rng(opt.seed, 0x6d6f64656c5f6664ULL);
    std::set<long long> picked;
    for (long long j = total - opt.subset; j < total; ++j) {
      const long long t = std::min(
          j, static_cast<long long>(rng.uniform() * static_cast<double>(j + 1)));
      picked.insert(picked.count(t) ? j : t);
    }
    chosen.assign(picked.begin(), picked.end());
  }

  AuditReport report;
  for (long long flat : chosen) {
    ParamAddress addr = locate_param(blocks, flat);
    const double orig = *addr.slot;
    *addr.slot = orig + opt.step;
    const double up = loss(forward(work, spec, x).z, false).value;
    *addr.slot = orig - opt.step;
    const double down = loss(forward(work, spec, x).z, false).value;
    *addr.slot = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw AuditError("finite_diff_audit: non-finite loss at parameter " +
                       addr.name);
    }
    const double fd = (up - down) / (2.0 * opt.step);
    const double an = *locate_param(analytic_blocks, flat).slot;
    const double rel =
        std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3});
    if (rel >= report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_parameter = addr.name;
    }
    ++report.checked;
  }
  return report;
}

void save_checkpoint(const std::string& path, const ModelSpec& spec,
                     const ModelState& state, std::uint64_t seed) {
  spec.validate();
  check_state_shapes(state, spec);
  nlohmann::json doc;
  doc["format"] = "miolab.checkpoint";
  doc["version"] = 1;
  doc["seed"] = seed;
  doc["spec"]["encoder"] = mlp_to_json(spec.encoder);
  doc["spec"]["projector"] = mlp_to_json(spec.projector);
  doc["params"]["encoder"] = params_to_json(state.enc_w, state.enc_b);
  doc["params"]["projector"] = params_to_json(state.proj_w, state.proj_b);
  std::ofstream out(path);
  if (!out) throw FormatError("checkpoint: cannot open " + path + " for write");
  out << doc.dump(1) << "\n";
  if (!out) throw FormatError("checkpoint: write to " + path + " failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("checkpoint: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
    if (doc.at("format").get<std::string>() != "miolab.checkpoint") {
      throw FormatError("checkpoint: unrecognized format marker");
    }
    if (doc.at("version").get<int>() != 1) {
      throw FormatError("checkpoint: unsupported version");
    }
    Checkpoint ckpt;
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.spec.encoder = mlp_from_json(doc.at("spec").at("encoder"));
    ckpt.spec.projector = mlp_from_json(doc.at("spec").at("projector"));
    ckpt.spec.validate();
    params_from_json(doc.at("params").at("encoder"), ckpt.spec.encoder,
                     ckpt.state.enc_w, ckpt.state.enc_b, "encoder");
    params_from_json(doc.at("params").at("projector"), ckpt.spec.projector,
                     ckpt.state.proj_w, ckpt.state.proj_b, "projector");
    for (const Mat* w : weight_views(ckpt.state)) {
      if (!w->allFinite()) throw FormatError("checkpoint: non-finite weight");
    }
    for (const Vec* b : bias_views(ckpt.state)) {
      if (!b->allFinite()) throw FormatError("checkpoint: non-finite bias");
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed document: ") +
                      e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: invalid spec: ") + e.what());
  }
}

}  // namespace mio
