// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mio/error.hpp"

namespace mio {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Deterministic pairwise-tree sum over x[0..n). Fixed left-to-right split
// order; platform-stable given IEEE doubles.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// softplus(x) = log(1 + e^x) without overflow for |x| up to at least 1e4.
template <typename T>
T softplus(T x) {
  if (x > T(0)) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// log_sigmoid(x) = log(1/(1+e^-x)) = -softplus(-x).
// Satisfies log_sigmoid(x) = x + log_sigmoid(-x).
template <typename T>
T log_sigmoid(T x) {
  if (!std::isfinite(x)) throw DomainError("log_sigmoid: non-finite input");
  return -softplus(-x);
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Inner product in fixed pairwise-tree order.
double dot(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v);

double l1_norm(const Eigen::Ref<const Vec>& v);

double l2_norm(const Eigen::Ref<const Vec>& v);

// dot(u,v)/(|u||v|), clamped to [-1,1]. Norms below 1e-12 are degenerate.
double cosine_similarity(const Eigen::Ref<const Vec>& u,
                         const Eigen::Ref<const Vec>& v);

// Counter-based splittable generator. Output is a pure function of
// (seed, stream, counter); identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Normal draw via Box-Muller; always consumes exactly two uniforms so the
  // stream position is independent of the arguments. sigma = 0 returns mean.
  double gaussian(double mean, double sigma);

  // Child generator for an independent stream; parent state is unaffected.
  Rng split(std::uint64_t child_stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mio
