// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/numerics.hpp"

#include <cmath>

namespace mio {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = x[0];
    for (std::size_t i = 1; i < n; ++i) acc += x[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

double dot(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v) {
  if (u.size() != v.size())
    throw DimensionError("dot: length mismatch " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
  std::vector<double> prod(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i)
    prod[static_cast<std::size_t>(i)] = u[i] * v[i];
  return pairwise_sum(prod);
}

double l1_norm(const Eigen::Ref<const Vec>& v) {
  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    mag[static_cast<std::size_t>(i)] = std::abs(v[i]);
  return pairwise_sum(mag);
}

double l2_norm(const Eigen::Ref<const Vec>& v) {
  return std::sqrt(dot(v, v));
}

double cosine_similarity(const Eigen::Ref<const Vec>& u,
                         const Eigen::Ref<const Vec>& v) {
  if (u.size() != v.size())
    throw DimensionError("cosine_similarity: length mismatch");
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu <= 1e-12 || nv <= 1e-12)
    throw DomainError("cosine_similarity: degenerate vector (norm <= 1e-12)");
  const double c = dot(u, v) / (nu * nv);
  return std::min(1.0, std::max(-1.0, c));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      key_(mix64(mix64(seed + kGolden) ^ mix64(stream + 0xD1B54A32D192ED03ull))) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t key)
    : seed_(seed), stream_(stream), key_(key) {}

std::uint64_t Rng::next_u64() { return mix64(key_ + kGolden * ++counter_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("uniform: lo > hi");
  return lo + (hi - lo) * uniform();
}

double Rng::gaussian(double mean, double sigma) {
  if (sigma < 0.0) throw DomainError("gaussian: negative sigma");
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  const double n01 = r * std::cos(2.0 * M_PI * u2);
  return mean + sigma * n01;
}

Rng Rng::split(std::uint64_t child_stream) const {
  const std::uint64_t child_key =
      mix64(key_ ^ mix64(child_stream + 0x94D049BB133111EBull));
  return Rng(seed_, child_stream, child_key);
}

}  // namespace mio
