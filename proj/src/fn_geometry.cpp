// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/fn_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "mio/error.hpp"

namespace mio {

namespace {

void check_config(const GeometryConfig& cfg) {
  if (!std::isfinite(cfg.x_o) || !std::isfinite(cfg.y_o) ||
      std::hypot(cfg.x_o, cfg.y_o) <= 0.0)
    throw ConfigError("centroid must be finite and away from the origin");
  if (!std::isfinite(cfg.sigma) || cfg.sigma <= 0.0)
    throw ConfigError("sigma must be finite and > 0, got " +
                      std::to_string(cfg.sigma));
  if (cfg.eta < 1)
    throw ConfigError("eta must be >= 1, got " + std::to_string(cfg.eta));
  if (cfg.t_p < 3)
    throw ConfigError("t_p must be >= 3, got " + std::to_string(cfg.t_p));
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

double symmetric_fn_probability(long long batch_size, long long num_classes,
                                long long samples_per_class) {
  if (batch_size < 1 || num_classes < 1 || samples_per_class < 1)
    throw DomainError("batch size, class count, and per-class count must be >= 1");
  const double capacity =
      static_cast<double>(samples_per_class) * static_cast<double>(num_classes);
  if (static_cast<double>(batch_size) > capacity)
    throw DomainError("batch of " + std::to_string(batch_size) +
                      " exceeds the population of " +
                      std::to_string(static_cast<long long>(capacity)));
  const double base = static_cast<double>(batch_size) / capacity;
  const double exponent =
      static_cast<double>(batch_size) / static_cast<double>(num_classes);
  if (exponent == std::floor(exponent) && exponent <= 64.0) {
    double p = 1.0;
    for (long long i = 0; i < static_cast<long long>(exponent); ++i) p *= base;
    return p;
  }
  return std::exp(exponent * std::log(base));
}

GeometryTrial run_trial_with(const GeometryConfig& cfg,
                             std::vector<double> radii,
                             std::vector<double> angles,
                             std::vector<double> weights) {
  check_config(cfg);
  if (cfg.eta > cfg.t_p - 2)
    throw DomainError("eta = " + std::to_string(cfg.eta) +
                      " exceeds t_p - 2 = " + std::to_string(cfg.t_p - 2));
  const std::size_t eta = static_cast<std::size_t>(cfg.eta);
  if (radii.size() != eta || angles.size() != eta || weights.size() != eta)
    throw DimensionError("trial inputs must all have length eta = " +
                         std::to_string(cfg.eta));
  for (std::size_t i = 0; i < eta; ++i) {
    if (!(std::abs(radii[i]) <= 3.0 * cfg.sigma))
      throw DomainError("radius " + std::to_string(radii[i]) +
                        " lies beyond 3 sigma");
    if (!(weights[i] >= 0.0 && weights[i] <= 1.0))
      throw DomainError("weight " + std::to_string(weights[i]) +
                        " must be in [0, 1]");
    if (!std::isfinite(angles[i]))
      throw DomainError("angles must be finite");
  }

  GeometryTrial t;
  t.radii = std::move(radii);
  t.angles = std::move(angles);
  t.weights = std::move(weights);

  std::vector<double> px(eta), py(eta);
  for (std::size_t i = 0; i < eta; ++i) {
    px[i] = t.weights[i] * (cfg.x_o + t.radii[i] * std::cos(t.angles[i]));
    py[i] = t.weights[i] * (cfg.y_o + t.radii[i] * std::sin(t.angles[i]));
  }
  const double denom = static_cast<double>(cfg.t_p - 2);
  t.x_prime = pairwise_sum(px) / denom;
  t.y_prime = pairwise_sum(py) / denom;

  const double weight_share = pairwise_sum(t.weights) / denom;
  t.a_x = weight_share * cfg.x_o;
  t.a_y = weight_share * cfg.y_o;
  const double b_x = t.x_prime - t.a_x;
  const double b_y = t.y_prime - t.a_y;
  t.b_mag = std::hypot(b_x, b_y);
  t.b_theta = std::atan2(b_y, b_x);
  t.phi = wrap_angle(std::atan2(t.y_prime, t.x_prime) -
                     std::atan2(cfg.y_o, cfg.x_o));
  return t;
}

GeometryTrial run_trial(const GeometryConfig& cfg, Rng& rng) {
  check_config(cfg);
  if (cfg.eta > cfg.t_p - 2)
    throw DomainError("eta = " + std::to_string(cfg.eta) +
                      " exceeds t_p - 2 = " + std::to_string(cfg.t_p - 2));
  const std::size_t eta = static_cast<std::size_t>(cfg.eta);
  std::vector<double> radii(eta), angles(eta), weights(eta);
  for (std::size_t i = 0; i < eta; ++i) {
    double r;
    do {
      r = rng.gaussian(0.0, cfg.sigma);
    } while (std::abs(r) > 3.0 * cfg.sigma);
    radii[i] = r;
    angles[i] = rng.uniform(0.0, 2.0 * M_PI);
    weights[i] = cfg.weight_mode == WeightMode::uniform_p ? 1.0 : rng.uniform();
  }
  return run_trial_with(cfg, std::move(radii), std::move(angles),
                        std::move(weights));
}

PhiStats monte_carlo_phi(const GeometryConfig& cfg, int trials, Rng& rng) {
  check_config(cfg);
  if (trials < 1)
    throw DomainError("trials must be >= 1, got " + std::to_string(trials));
  std::vector<double> abs_phi(static_cast<std::size_t>(trials));
  PhiStats s;
  long long positive = 0;
  for (int i = 0; i < trials; ++i) {
    Rng sub = rng.split(static_cast<std::uint64_t>(i));
    const GeometryTrial t = run_trial(cfg, sub);
    abs_phi[static_cast<std::size_t>(i)] = std::abs(t.phi);
    s.max_abs_phi = std::max(s.max_abs_phi, std::abs(t.phi));
    if (std::cos(t.phi) > 0.0) ++positive;
  }
  s.mean_abs_phi = pairwise_sum(abs_phi) / static_cast<double>(trials);
  s.frac_cos_positive =
      static_cast<double>(positive) / static_cast<double>(trials);
  return s;
}

PhiCase classify_phi_case(double x_o, double y_o, double theta) {
  if (!std::isfinite(x_o) || !std::isfinite(y_o) || !std::isfinite(theta))
    throw DomainError("classify_phi_case needs finite inputs");
  if (x_o == 0.0)
    throw DomainError("x_o = 0 leaves the case quantity undefined");
  if (theta < 0.0) {
    PhiCase mirrored = classify_phi_case(x_o, -y_o, -theta);
    mirrored.predicted_phi = -mirrored.predicted_phi;
    return mirrored;
  }
  PhiCase c;
  const double q = (x_o * x_o - y_o * y_o) / x_o;
  if (q == 0.0) {
    c.degenerate = true;
    c.predicted_phi = std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  c.q_sign = q > 0.0 ? 1 : -1;
  const double ray = std::atan(y_o / x_o);
  c.xi = theta > M_PI / 2.0 - ray ? 1 : 0;
  c.predicted_phi = c.xi == 0 ? theta + ray : -M_PI + theta + ray;
  return c;
}

}  // namespace mio
