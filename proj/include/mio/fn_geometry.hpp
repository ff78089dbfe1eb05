// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mio/numerics.hpp"

namespace mio {

enum class WeightMode { uniform_p, random_p };

// Planar model of the in-batch false negatives around a class centroid.
struct GeometryConfig {
  double x_o = 1.0;       // centroid; must not sit at the origin
  double y_o = 0.0;
  double sigma = 1.0;     // class spread, > 0
  int eta = 1;            // false-negative count, >= 1
  int t_p = 4;            // pair normalizer, >= 3; trials need eta <= t_p - 2
  WeightMode weight_mode = WeightMode::uniform_p;
};

struct GeometryTrial {
  std::vector<double> radii;    // |r_i| <= 3 sigma by construction
  std::vector<double> angles;
  std::vector<double> weights;  // p_i in [0, 1]
  double x_prime = 0.0;         // weighted resultant / (t_p - 2)
  double y_prime = 0.0;
  double a_x = 0.0;             // centroid component of the decomposition
  double a_y = 0.0;
  double b_mag = 0.0;           // spread component magnitude
  double b_theta = 0.0;
  double phi = 0.0;             // deviation from the centroid ray, in (-pi, pi]
};

struct PhiStats {
  double mean_abs_phi = 0.0;
  double max_abs_phi = 0.0;
  double frac_cos_positive = 0.0;
};

// Case split for the closed-form deviation angle. predicted_phi is only
// meaningful when degenerate is false.
struct PhiCase {
  int q_sign = 0;       // sign of (x_o^2 - y_o^2) / x_o
  int xi = 0;           // branch selector of the closed form
  double predicted_phi = 0.0;
  bool degenerate = false;
};

// Probability of drawing a batch spread evenly over every class division:
// (batch / (per_class * classes)) ^ (batch / classes). Small integral
// exponents multiply out exactly; everything else evaluates in log space.
double symmetric_fn_probability(long long batch_size, long long num_classes,
                                long long samples_per_class);

// Deterministic core: computes the resultant, its centroid/spread
// decomposition, and the deviation angle from injected samples.
GeometryTrial run_trial_with(const GeometryConfig& cfg,
                             std::vector<double> radii,
                             std::vector<double> angles,
                             std::vector<double> weights);

// Draws radii ~ N(0, sigma) rejection-truncated at 3 sigma, angles uniform
// on [0, 2 pi), and weights per weight_mode, then delegates to run_trial_with.
GeometryTrial run_trial(const GeometryConfig& cfg, Rng& rng);

// Aggregates run_trial over per-trial substreams split from rng.
PhiStats monte_carlo_phi(const GeometryConfig& cfg, int trials, Rng& rng);

// Closed-form deviation prediction. Negative theta is handled by mirror
// symmetry across the x-axis. Q = 0 is reported as degenerate.
PhiCase classify_phi_case(double x_o, double y_o, double theta);

}  // namespace mio
