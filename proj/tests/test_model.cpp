// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "mio/model.hpp"
#include "mio/pairing.hpp"

namespace {

mio::Mat random_batch(int rows, int cols, std::uint64_t seed) {
  mio::Rng rng(seed);
  mio::Mat x(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) x(r, c) = rng.gaussian(0.0, 1.0);
  }
  return x;
}

mio::ModelSpec two_layer_spec(mio::Normalization norm) {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({4, 6}, norm, true);
  spec.encoder.normalizations[0] = norm;  // single layer, keep norm active
  spec.projector = mio::make_projector_spec({6, 3}, mio::Normalization::none,
                                            true);
  return spec;
}

// 0.5 * |z - target|^2; gradient z - target.
mio::LossClosure quadratic_loss(const mio::Mat& target) {
  return [target](const mio::Mat& z, bool want_grad) {
    mio::LossReport rep;
    const mio::Mat d = z - target;
    rep.value = 0.5 * d.array().square().sum();
    if (want_grad) rep.grad_z = d;
    return rep;
  };
}

mio::LossClosure contrastive_closure(const mio::PairIndexSet& pairs,
                                     const mio::LossConfig& cfg,
                                     const std::string& which) {
  return [pairs, cfg, which](const mio::Mat& z, bool want_grad) {
    if (which == "infonce") {
      return want_grad ? mio::infonce_grad_z(z, pairs, cfg)
                       : mio::infonce_loss(z, pairs, cfg);
    }
    if (which == "mio_l2") return mio::mio_l2_loss(z, pairs, cfg);
    return want_grad ? mio::mio_grad_z(z, pairs, cfg)
                     : mio::mio_loss(z, pairs, cfg);
  };
}

double max_abs_diff(const mio::Mat& a, const mio::Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spec validation rejects malformed shapes") {
  mio::MlpSpec mlp;
  mlp.widths = {4};
  mlp.activations = {};
  mlp.normalizations = {};
  CHECK_THROWS_AS(mlp.validate(), mio::ConfigError);

  mlp.widths = {4, 0};
  mlp.activations = {mio::Activation::relu};
  mlp.normalizations = {mio::Normalization::none};
  CHECK_THROWS_AS(mlp.validate(), mio::ConfigError);

  mlp.widths = {4, 3};
  mlp.activations = {};
  CHECK_THROWS_AS(mlp.validate(), mio::ConfigError);

  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({4, 6}, mio::Normalization::none, true);
  spec.projector =
      mio::make_projector_spec({5, 3}, mio::Normalization::none, true);
  CHECK_THROWS_AS(spec.validate(), mio::ConfigError);

  CHECK_THROWS_AS(mio::parse_activation("gelu"), mio::ConfigError);
  CHECK_THROWS_AS(mio::parse_normalization("layer"), mio::ConfigError);
  CHECK(mio::parse_activation("relu") == mio::Activation::relu);
  CHECK(mio::parse_normalization("batch_standardize") ==
        mio::Normalization::batch_standardize);
}

TEST_CASE("encoder factory forces a final relu layer without normalization") {
  const auto enc = mio::make_encoder_spec(
      {8, 16, 16}, mio::Normalization::batch_standardize, true);
  CHECK(enc.activations.back() == mio::Activation::relu);
  CHECK(enc.normalizations.back() == mio::Normalization::none);
  CHECK(enc.normalizations.front() == mio::Normalization::batch_standardize);

  const auto proj = mio::make_projector_spec(
      {16, 16, 4}, mio::Normalization::batch_standardize, false);
  CHECK(proj.activations.front() == mio::Activation::identity);
  CHECK(proj.activations.back() == mio::Activation::identity);
  CHECK(proj.normalizations.back() == mio::Normalization::none);
}

TEST_CASE("identity network reproduces its input exactly") {
  mio::ModelSpec spec;
  spec.encoder.widths = {3, 3};
  spec.encoder.activations = {mio::Activation::identity};
  spec.encoder.normalizations = {mio::Normalization::none};
  spec.encoder.use_bias = false;
  spec.projector = spec.encoder;

  mio::ModelState state = mio::zero_state(spec);
  state.enc_w[0] = mio::Mat::Identity(3, 3);
  state.proj_w[0] = mio::Mat::Identity(3, 3);

  const mio::Mat x = random_batch(5, 3, 101);
  const auto trace = mio::forward(state, spec, x);
  CHECK((trace.z.array() == x.array()).all());
  CHECK((trace.h.array() == x.array()).all());
}

TEST_CASE("single relu layer clamps negatives") {
  mio::ModelSpec spec;
  spec.encoder.widths = {2, 2};
  spec.encoder.activations = {mio::Activation::relu};
  spec.encoder.normalizations = {mio::Normalization::none};
  spec.encoder.use_bias = false;
  spec.projector.widths = {2, 2};
  spec.projector.activations = {mio::Activation::identity};
  spec.projector.normalizations = {mio::Normalization::none};
  spec.projector.use_bias = false;

  mio::ModelState state = mio::zero_state(spec);
  state.enc_w[0] = mio::Mat::Identity(2, 2);
  state.proj_w[0] = mio::Mat::Identity(2, 2);

  mio::Mat x(1, 2);
  x << -1.0, 2.0;
  const auto trace = mio::forward(state, spec, x);
  CHECK(trace.z(0, 0) == 0.0);
  CHECK(trace.z(0, 1) == 2.0);
}

TEST_CASE("batch standardization matches the closed form") {
  mio::ModelSpec spec;
  spec.encoder.widths = {1, 1};
  spec.encoder.activations = {mio::Activation::identity};
  spec.encoder.normalizations = {mio::Normalization::batch_standardize};
  spec.encoder.use_bias = false;
  spec.projector.widths = {1, 1};
  spec.projector.activations = {mio::Activation::identity};
  spec.projector.normalizations = {mio::Normalization::none};
  spec.projector.use_bias = false;

  mio::ModelState state = mio::zero_state(spec);
  state.enc_w[0](0, 0) = 1.0;
  state.proj_w[0](0, 0) = 1.0;

  mio::Mat x(2, 1);
  x << 0.0, 2.0;
  const auto trace = mio::forward(state, spec, x);
  // mean 1, biased variance 1: output is -+1/sqrt(1 + 1e-5)
  CHECK(trace.z(0, 0) == -0.99999500003749975);
  CHECK(trace.z(1, 0) == 0.99999500003749975);

  mio::Mat same(2, 1);
  same << 3.0, 3.0;
  const auto t2 = mio::forward(state, spec, same);
  CHECK(t2.z(0, 0) == 0.0);
  CHECK(t2.z(1, 0) == 0.0);
}

TEST_CASE("init is seed-deterministic with zero biases and He variance") {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({100, 50}, mio::Normalization::none,
                                        true);
  spec.projector =
      mio::make_projector_spec({50, 4}, mio::Normalization::none, true);

  mio::Rng ra(11);
  mio::Rng rb(11);
  const auto sa = mio::init_params(spec, ra);
  const auto sb = mio::init_params(spec, rb);
  CHECK((sa.enc_w[0].array() == sb.enc_w[0].array()).all());
  CHECK((sa.proj_w[0].array() == sb.proj_w[0].array()).all());
  CHECK(sa.enc_b[0].isZero(0.0));
  CHECK(sa.proj_b[0].isZero(0.0));
  CHECK(sa.parameter_count() == 100 * 50 + 50 + 50 * 4 + 4);

  // First draws at fan_in 100, mirrored from the generator definition.
  CHECK(sa.enc_w[0](0, 0) == doctest::Approx(0.13593377339942711).epsilon(1e-14));
  CHECK(sa.enc_w[0](0, 1) ==
        doctest::Approx(-0.19101563721977616).epsilon(1e-14));

  // Empirical variance of 5000 draws targets 2/fan_in = 0.02.
  const double mean = sa.enc_w[0].mean();
  const double var =
      (sa.enc_w[0].array() - mean).square().sum() / (sa.enc_w[0].size() - 1.0);
  CHECK(std::abs(var - 0.02) <= 0.004);

  mio::Rng rc(12);
  const auto sc = mio::init_params(spec, rc);
  CHECK(sc.enc_w[0](0, 0) != sa.enc_w[0](0, 0));
}

TEST_CASE("forward matches an independently computed reference network") {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec(
      {3, 4, 4}, mio::Normalization::batch_standardize, true);
  spec.projector =
      mio::make_projector_spec({4, 3}, mio::Normalization::none, true);

  mio::Rng rng(5);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(6, 3, 7);

  const auto trace = mio::forward(state, spec, x);
  CHECK((trace.h.array() >= 0.0).all());

  mio::Mat want(6, 3);
  want << -0.9675295312214256, 0.20596182168769589, -1.8284637599472398,
      -0.75868946877829779, 0.096080960326762624, -1.9034560706634063,
      -0.68280613708718052, -0.018547342877956785, -2.4669744683722539,
      -2.3818292817158677, 0.63545041875561081, -5.095752118915005,
      -0.48166691210180107, 0.17416710576942027, -1.2418805258290047,
      -0.11503198327146225, -0.076717378888487536, -0.94391313964905088;
  CHECK(max_abs_diff(trace.z, want) <= 1e-12);

  const auto again = mio::forward(state, spec, x);
  CHECK((again.z.array() == trace.z.array()).all());
}

TEST_CASE("forward is permutation-equivariant without normalization") {
  const auto spec = two_layer_spec(mio::Normalization::none);
  mio::Rng rng(31);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(6, 4, 32);

  const auto trace = mio::forward(state, spec, x);
  const mio::Mat xr = x.colwise().reverse();
  const auto reversed = mio::forward(state, spec, xr);
  CHECK(max_abs_diff(reversed.z, trace.z.colwise().reverse()) <= 1e-12);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  const auto spec = two_layer_spec(mio::Normalization::batch_standardize);
  mio::Rng rng(41);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(6, 4, 42);
  const auto trace = mio::forward(state, spec, x);

  const auto grads =
      mio::backward(state, spec, trace, mio::Mat::Zero(6, 3));
  for (const mio::Mat* w : mio::weight_views(grads)) CHECK(w->isZero(0.0));
  for (const mio::Vec* b : mio::bias_views(grads)) CHECK(b->isZero(0.0));
}

TEST_CASE("one-sample linear gradient is the outer product") {
  mio::ModelSpec spec;
  spec.encoder.widths = {3, 2};
  spec.encoder.activations = {mio::Activation::identity};
  spec.encoder.normalizations = {mio::Normalization::none};
  spec.encoder.use_bias = true;
  spec.projector.widths = {2, 2};
  spec.projector.activations = {mio::Activation::identity};
  spec.projector.normalizations = {mio::Normalization::none};
  spec.projector.use_bias = false;

  mio::Rng rng(51);
  mio::ModelState state = mio::init_params(spec, rng);
  state.proj_w[0] = mio::Mat::Identity(2, 2);

  mio::Mat x(1, 3);
  x << 0.5, -1.25, 2.0;
  const auto trace = mio::forward(state, spec, x);

  mio::Mat gz(1, 2);
  gz << 0.7, -1.3;
  const auto grads = mio::backward(state, spec, trace, gz);

  for (int m = 0; m < 2; ++m) {
    for (int t = 0; t < 3; ++t) {
      CHECK(grads.enc_w[0](m, t) == gz(0, m) * x(0, t));
    }
    CHECK(grads.enc_b[0](m) == gz(0, m));
    for (int f = 0; f < 2; ++f) {
      CHECK(grads.proj_w[0](m, f) == gz(0, m) * trace.h(0, f));
    }
  }
}

TEST_CASE("backward matches finite differences on a random two-layer model") {
  const mio::Mat x = random_batch(6, 4, 61);
  const mio::Mat target = random_batch(6, 3, 62);

  SUBCASE("normalization off") {
    const auto spec = two_layer_spec(mio::Normalization::none);
    mio::Rng rng(63);
    const auto state = mio::init_params(spec, rng);
    const auto report =
        mio::finite_diff_audit(state, spec, x, quadratic_loss(target));
    CHECK(report.checked == state.parameter_count());
    CHECK(report.max_rel_err <= 1e-6);
  }
  SUBCASE("batch standardization on") {
    const auto spec = two_layer_spec(mio::Normalization::batch_standardize);
    mio::Rng rng(64);
    const auto state = mio::init_params(spec, rng);
    const auto report =
        mio::finite_diff_audit(state, spec, x, quadratic_loss(target));
    CHECK(report.max_rel_err <= 1e-4);
  }
}

TEST_CASE("audit of a linear model under quadratic loss is exact") {
  mio::ModelSpec spec;
  spec.encoder.widths = {3, 4};
  spec.encoder.activations = {mio::Activation::identity};
  spec.encoder.normalizations = {mio::Normalization::none};
  spec.encoder.use_bias = true;
  spec.projector.widths = {4, 2};
  spec.projector.activations = {mio::Activation::identity};
  spec.projector.normalizations = {mio::Normalization::none};
  spec.projector.use_bias = false;

  mio::Rng rng(71);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(5, 3, 72);
  const mio::Mat target = random_batch(5, 2, 73);

  // Central differences are step-exact on a quadratic, so the widest
  // permitted step minimizes float cancellation.
  mio::AuditOptions opt;
  opt.step = 1e-3;
  const auto report =
      mio::finite_diff_audit(state, spec, x, quadratic_loss(target), opt);
  CHECK(report.max_rel_err <= 1e-9);
  CHECK(!report.worst_parameter.empty());
}

TEST_CASE("audit passes end-to-end for every contrastive loss") {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({4, 8, 8}, mio::Normalization::none,
                                        true);
  spec.projector =
      mio::make_projector_spec({8, 4}, mio::Normalization::none, true);
  mio::Rng rng(83);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(8, 4, 84);
  const auto pairs = mio::build_pairs(4);

  mio::LossConfig cosine{0.5, 0.0, mio::SimilarityMode::cosine};
  mio::LossConfig with_l2{0.5, 0.5, mio::SimilarityMode::cosine};
  for (const auto& [cfg, name] :
       {std::pair{cosine, "mio"}, std::pair{cosine, "infonce"},
        std::pair{with_l2, "mio_l2"}}) {
    const auto report = mio::finite_diff_audit(
        state, spec, x, contrastive_closure(pairs, cfg, name));
    CAPTURE(name);
    CHECK(report.max_rel_err <= 1e-6);
  }
}

TEST_CASE("audit flags corrupted gradients") {
  const auto spec = two_layer_spec(mio::Normalization::none);
  mio::Rng rng(91);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(6, 4, 92);
  const mio::Mat target = random_batch(6, 3, 93);
  const auto loss = quadratic_loss(target);

  const auto trace = mio::forward(state, spec, x);
  mio::ModelState corrupted =
      mio::backward(state, spec, trace, loss(trace.z, true).grad_z);
  corrupted.enc_w[0] *= 1.5;

  const auto report =
      mio::finite_diff_audit(state, spec, x, loss, {}, &corrupted);
  CHECK(report.max_rel_err > 1e-2);
  CHECK(report.worst_parameter.substr(0, 9) == "encoder.w");
}

TEST_CASE("audit subsetting is seed-deterministic") {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({16, 32}, mio::Normalization::none,
                                        true);
  spec.projector =
      mio::make_projector_spec({32, 8}, mio::Normalization::none, true);
  mio::Rng rng(94);
  const auto state = mio::init_params(spec, rng);
  REQUIRE(state.parameter_count() > 200);
  const mio::Mat x = random_batch(5, 16, 95);
  const mio::Mat target = random_batch(5, 8, 96);

  mio::AuditOptions opt;
  opt.seed = 3;
  const auto a =
      mio::finite_diff_audit(state, spec, x, quadratic_loss(target), opt);
  const auto b =
      mio::finite_diff_audit(state, spec, x, quadratic_loss(target), opt);
  CHECK(a.checked == 200);
  CHECK(a.max_rel_err == b.max_rel_err);
  CHECK(a.worst_parameter == b.worst_parameter);
  CHECK(a.max_rel_err <= 1e-6);
}

TEST_CASE("audit rejects bad options and non-finite losses") {
  const auto spec = two_layer_spec(mio::Normalization::none);
  mio::Rng rng(97);
  const auto state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(4, 4, 98);
  const mio::Mat target = random_batch(4, 3, 99);

  mio::AuditOptions opt;
  opt.step = 1e-8;
  CHECK_THROWS_AS(
      mio::finite_diff_audit(state, spec, x, quadratic_loss(target), opt),
      mio::DomainError);
  opt.step = 2e-3;
  CHECK_THROWS_AS(
      mio::finite_diff_audit(state, spec, x, quadratic_loss(target), opt),
      mio::DomainError);

  const auto nan_everywhere = [](const mio::Mat& z, bool want_grad) {
    mio::LossReport rep;
    rep.value = std::numeric_limits<double>::quiet_NaN();
    if (want_grad) rep.grad_z = mio::Mat::Zero(z.rows(), z.cols());
    return rep;
  };
  CHECK_THROWS_WITH_AS(
      mio::finite_diff_audit(state, spec, x, nan_everywhere),
      doctest::Contains("baseline"), mio::AuditError);

  const auto nan_when_perturbed = [&target](const mio::Mat& z,
                                            bool want_grad) {
    mio::LossReport rep = quadratic_loss(target)(z, want_grad);
    if (!want_grad) rep.value = std::numeric_limits<double>::quiet_NaN();
    return rep;
  };
  CHECK_THROWS_WITH_AS(
      mio::finite_diff_audit(state, spec, x, nan_when_perturbed),
      doctest::Contains("encoder.w[0](0,0)"), mio::AuditError);
}

TEST_CASE("relu-final encoder trips on non-finite parameters") {
  const auto spec = two_layer_spec(mio::Normalization::none);
  mio::Rng rng(111);
  mio::ModelState state = mio::init_params(spec, rng);
  const mio::Mat x = random_batch(4, 4, 112);
  CHECK_NOTHROW(mio::forward(state, spec, x));

  state.enc_w[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mio::forward(state, spec, x), mio::DomainError);
}

TEST_CASE("shape mismatches are rejected") {
  const auto spec = two_layer_spec(mio::Normalization::none);
  mio::Rng rng(121);
  const auto state = mio::init_params(spec, rng);

  CHECK_THROWS_AS(mio::forward(state, spec, random_batch(4, 5, 122)),
                  mio::DimensionError);

  const mio::Mat x = random_batch(4, 4, 123);
  const auto trace = mio::forward(state, spec, x);
  CHECK_THROWS_AS(mio::backward(state, spec, trace, mio::Mat::Zero(4, 2)),
                  mio::DimensionError);
  CHECK_THROWS_AS(mio::backward(state, spec, trace, mio::Mat::Zero(3, 3)),
                  mio::DimensionError);

  mio::ModelState bad = state;
  bad.enc_w[0] = mio::Mat::Zero(6, 5);
  CHECK_THROWS_AS(mio::forward(bad, spec, x), mio::DimensionError);
}

TEST_CASE("two-layer linear projector collapses to its matrix product") {
  mio::ModelSpec wide;
  wide.encoder = mio::make_encoder_spec({3, 5}, mio::Normalization::none,
                                        false);
  wide.projector.widths = {5, 4, 2};
  wide.projector.activations = {mio::Activation::identity,
                                mio::Activation::identity};
  wide.projector.normalizations = {mio::Normalization::none,
                                   mio::Normalization::none};
  wide.projector.use_bias = false;

  mio::Rng rng(131);
  const auto s2 = mio::init_params(wide, rng);
  const mio::Mat x = random_batch(6, 3, 132);
  const auto t2 = mio::forward(s2, wide, x);
  REQUIRE((t2.h.array() >= 0.0).all());

  mio::ModelSpec flat = wide;
  flat.projector.widths = {5, 2};
  flat.projector.activations = {mio::Activation::identity};
  flat.projector.normalizations = {mio::Normalization::none};
  mio::ModelState s1 = mio::zero_state(flat);
  s1.enc_w = s2.enc_w;
  s1.enc_b = s2.enc_b;
  s1.proj_w[0] = s2.proj_w[1] * s2.proj_w[0];

  const auto t1 = mio::forward(s1, flat, x);
  CHECK(max_abs_diff(t1.z, t2.z) <= 1e-12);

  const auto pairs = mio::build_pairs(3);
  const mio::LossConfig cfg{1.0, 0.0, mio::SimilarityMode::dot};

  SUBCASE("pair-influence reconstruction agrees with backward") {
    for (const bool use_infonce : {false, true}) {
      const auto rep = use_infonce ? mio::infonce_grad_z(t1.z, pairs, cfg)
                                   : mio::mio_grad_z(t1.z, pairs, cfg);
      const auto g1 = mio::backward(s1, flat, t1, rep.grad_z);
      const mio::Vec contracted = g1.proj_w[0].rowwise().sum();
      const mio::Vec want =
          use_infonce ? mio::projector_grad_infonce(t1.z, t1.h, pairs, cfg)
                      : mio::projector_grad_mio(t1.z, t1.h, pairs, cfg);
      CAPTURE(use_infonce);
      CHECK((contracted - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("factor gradients follow from the product gradient") {
    const auto rep = mio::mio_grad_z(t1.z, pairs, cfg);
    const auto g1 = mio::backward(s1, flat, t1, rep.grad_z);
    const auto rep2 = mio::mio_grad_z(t2.z, pairs, cfg);
    const auto g2 = mio::backward(s2, wide, t2, rep2.grad_z);

    const mio::Mat& dq = g1.proj_w[0];
    CHECK(max_abs_diff(g2.proj_w[0], s2.proj_w[1].transpose() * dq) <= 1e-12);
    CHECK(max_abs_diff(g2.proj_w[1], dq * s2.proj_w[0].transpose()) <= 1e-12);
  }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec(
      {4, 6, 5}, mio::Normalization::batch_standardize, true);
  spec.projector =
      mio::make_projector_spec({5, 3}, mio::Normalization::none, false);
  mio::Rng rng(141);
  const auto state = mio::init_params(spec, rng);

  const std::string path = "model_ckpt_roundtrip.json";
  mio::save_checkpoint(path, spec, state, 909);
  const auto loaded = mio::load_checkpoint(path);

  CHECK(loaded.seed == 909);
  CHECK(loaded.spec.encoder.widths == spec.encoder.widths);
  CHECK(loaded.spec.projector.use_bias == spec.projector.use_bias);
  for (std::size_t l = 0; l < state.enc_w.size(); ++l) {
    CHECK((loaded.state.enc_w[l].array() == state.enc_w[l].array()).all());
    CHECK((loaded.state.enc_b[l].array() == state.enc_b[l].array()).all());
  }
  CHECK((loaded.state.proj_w[0].array() == state.proj_w[0].array()).all());

  const mio::Mat x = random_batch(6, 4, 142);
  const auto before = mio::forward(state, spec, x);
  const auto after = mio::forward(loaded.state, loaded.spec, x);
  CHECK((before.z.array() == after.z.array()).all());

  std::remove(path.c_str());
}

TEST_CASE("checkpoint loading rejects damaged documents") {
  CHECK_THROWS_AS(mio::load_checkpoint("no_such_checkpoint.json"),
                  mio::FormatError);

  const std::string garbled = "model_ckpt_garbled.json";
  {
    std::ofstream out(garbled);
    out << "not a checkpoint {{{\n";
  }
  CHECK_THROWS_AS(mio::load_checkpoint(garbled), mio::FormatError);
  std::remove(garbled.c_str());

  mio::ModelSpec spec;
  spec.encoder = mio::make_encoder_spec({3, 4}, mio::Normalization::none, true);
  spec.projector =
      mio::make_projector_spec({4, 2}, mio::Normalization::none, true);
  mio::Rng rng(151);
  const auto state = mio::init_params(spec, rng);
  const std::string path = "model_ckpt_damage.json";
  mio::save_checkpoint(path, spec, state, 1);

  nlohmann::json doc;
  {
    std::ifstream in(path);
    in >> doc;
  }

  auto rewrite = [&path](const nlohmann::json& d) {
    std::ofstream out(path);
    out << d.dump();
  };

  nlohmann::json bad_version = doc;
  bad_version["version"] = 2;
  rewrite(bad_version);
  CHECK_THROWS_AS(mio::load_checkpoint(path), mio::FormatError);

  nlohmann::json bad_marker = doc;
  bad_marker["format"] = "something.else";
  rewrite(bad_marker);
  CHECK_THROWS_AS(mio::load_checkpoint(path), mio::FormatError);

  nlohmann::json bad_shape = doc;
  bad_shape["params"]["encoder"][0]["w"][0].erase(2);
  rewrite(bad_shape);
  CHECK_THROWS_AS(mio::load_checkpoint(path), mio::FormatError);

  nlohmann::json bad_value = doc;
  bad_value["params"]["encoder"][0]["w"][0][0] = "oops";
  rewrite(bad_value);
  CHECK_THROWS_AS(mio::load_checkpoint(path), mio::FormatError);

  std::remove(path.c_str());
}
