// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mio/error.hpp"
#include "mio/mi_oracle.hpp"
#include "mio/numerics.hpp"

using mio::BoundReport;
using mio::DiscreteJoint;
using mio::Mat;
using mio::Vec;

namespace {

DiscreteJoint uniform_independent(int k) {
  Mat p = Mat::Constant(k, k, 1.0 / (k * k));
  return mio::make_joint(p);
}

DiscreteJoint correlated_uniform(int k) {
  Mat p = Mat::Zero(k, k);
  for (int a = 0; a < k; ++a) p(a, a) = 1.0 / k;
  return mio::make_joint(p);
}

DiscreteJoint hand_joint() {
  Mat p(2, 2);
  p << 0.4, 0.1, 0.1, 0.4;
  return mio::make_joint(p);
}

}  // namespace

TEST_CASE("make_joint validates and derives row-sum marginals") {
  DiscreteJoint j = hand_joint();
  CHECK(j.k() == 2);
  CHECK(j.p_marg(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(j.p_marg(1) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(mio::make_joint(Mat::Ones(2, 3) / 6.0), mio::DomainError);
  Mat negative(2, 2);
  negative << 0.6, 0.5, -0.1, 0.0;
  CHECK_THROWS_AS(mio::make_joint(negative), mio::DomainError);
  CHECK_THROWS_AS(mio::make_joint(Mat::Constant(2, 2, 0.3)), mio::DomainError);
}

TEST_CASE("mutual information on hand-checkable joints") {
  CHECK(mio::mutual_information(uniform_independent(2)) == 0.0);
  CHECK(mio::mutual_information(uniform_independent(4)) == 0.0);
  CHECK(mio::mutual_information(correlated_uniform(4)) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(mio::mutual_information(hand_joint()) ==
        doctest::Approx(0.19274475702175753).epsilon(1e-14));
}

TEST_CASE("plug-in scores are the density ratios with a floor") {
  Mat ones = mio::plug_in_scores(uniform_independent(2));
  CHECK((ones.array() == 1.0).all());

  Mat corr = mio::plug_in_scores(correlated_uniform(2));
  CHECK(corr(0, 0) == 2.0);
  CHECK(corr(1, 1) == 2.0);
  CHECK(corr(0, 1) == 4e-300);  // floored cell / (1/2 * 1/2)
  CHECK(corr(1, 0) == 4e-300);

  Mat hand = mio::plug_in_scores(hand_joint());
  CHECK(hand(0, 0) == 1.6);
  CHECK(hand(0, 1) == 0.4);
  CHECK(hand(1, 0) == 0.4);
  CHECK(hand(1, 1) == 1.6);

  Mat degenerate(2, 2);
  degenerate << 0.0, 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(mio::plug_in_scores(mio::make_joint(degenerate)),
                  mio::DomainError);
}

TEST_CASE("expected loss: independent plug-in case and perfect classifier") {
  DiscreteJoint ind = uniform_independent(3);
  const double loss = mio::expected_mio_loss(ind, mio::plug_in_scores(ind));
  CHECK(loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));

  // All mass on one cell; scores huge there and tiny where the product
  // measure lives. The classification risk collapses to zero.
  Mat single = Mat::Zero(2, 2);
  single(0, 1) = 1.0;
  DiscreteJoint det = mio::make_joint(single);
  Mat s(2, 2);
  s << 1e-12, 1e12, 1.0, 1.0;
  const double tiny = mio::expected_mio_loss(det, s);
  CHECK(tiny >= 0.0);
  CHECK(tiny <= 1e-11);

  CHECK_THROWS_AS(mio::expected_mio_loss(det, Mat::Ones(3, 3)),
                  mio::DimensionError);
  Mat bad = Mat::Ones(2, 2);
  bad(1, 1) = 0.0;
  CHECK_THROWS_AS(mio::expected_mio_loss(det, bad), mio::DomainError);
}

TEST_CASE("bound components on the independent joint") {
  BoundReport r = mio::verify_bound(uniform_independent(2));
  CHECK(r.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(std::abs(r.i_pos) <= 1e-15);
  CHECK(std::abs(r.i_neg_tilde) <= 1e-15);
  CHECK(r.slack == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bound components on the correlated uniform joint") {
  BoundReport r = mio::verify_bound(correlated_uniform(2));
  // Diagonal scores are 2; floored off-diagonal cells contribute ~1e-300.
  CHECK(r.loss ==
        doctest::Approx(std::log(1.5) + 0.5 * std::log(3.0)).epsilon(1e-12));
  CHECK(r.i_pos == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(r.i_neg_tilde ==
        doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(4e-300))
            .epsilon(1e-14));
  CHECK(r.slack == r.loss + r.i_pos - r.i_neg_tilde);
  CHECK(r.slack > 0.0);
}

TEST_CASE("bound components on a pinned random joint") {
  mio::Rng rng(2024);
  DiscreteJoint j = mio::random_dirichlet_joint(4, rng);
  CHECK(j.p_joint(0, 0) == doctest::Approx(0.1272473719534247).epsilon(1e-15));
  BoundReport r = mio::verify_bound(j);
  CHECK(r.loss == doctest::Approx(1.1943836737171418).epsilon(1e-12));
  CHECK(r.i_pos == doctest::Approx(0.37259780947146581).epsilon(1e-12));
  CHECK(r.i_neg_tilde ==
        doctest::Approx(-0.51260708180680747).epsilon(1e-12));
  CHECK(r.slack == doctest::Approx(2.0795885649954151).epsilon(1e-12));
}

TEST_CASE("bound holds across a randomized sweep of joints") {
  mio::Rng rng(31337);
  int trial = 0;
  for (int k : {2, 4, 8}) {
    for (int rep = 0; rep < 34; ++rep) {
      if (++trial > 100) break;
      mio::Rng sub = rng.split(static_cast<std::uint64_t>(trial));
      DiscreteJoint j = mio::random_dirichlet_joint(k, sub);
      BoundReport r = mio::verify_bound(j);
      CHECK(r.slack >= -1e-12);
      CHECK(r.loss >= 0.0);
      CHECK(r.i_pos >= -1e-15);
      CHECK(r.i_neg_tilde <= 1e-15);
    }
  }
}

TEST_CASE("dirichlet joints are reproducible and well formed") {
  mio::Rng a(99), b(99), c(100);
  DiscreteJoint ja = mio::random_dirichlet_joint(4, a);
  DiscreteJoint jb = mio::random_dirichlet_joint(4, b);
  DiscreteJoint jc = mio::random_dirichlet_joint(4, c);
  CHECK((ja.p_joint.array() == jb.p_joint.array()).all());
  CHECK(!(ja.p_joint.array() == jc.p_joint.array()).all());
  CHECK((ja.p_joint.array() >= 0.0).all());
  CHECK((ja.p_marg.array() > 0.0).all());
  CHECK_THROWS_AS(mio::random_dirichlet_joint(0, a), mio::DomainError);
}
