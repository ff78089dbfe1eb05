// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mio/numerics.hpp"

namespace mio {

struct VectorDatasetSpec {
  int num_classes = 2;
  int samples_per_class = 100;
  int ambient_dim = 32;          // must fit a (num_classes - 1)-simplex
  double class_separation = 5.0; // pairwise distance between class means
  double within_class_sigma = 1.0;
  std::uint64_t seed = 0;
};

struct VectorDataset {
  Mat x;                   // one sample per row, grouped by class
  std::vector<int> labels;
};

// Class means sit at the vertices of a regular simplex scaled so every
// pairwise distance equals class_separation; samples add isotropic noise.
VectorDataset make_vector_dataset(const VectorDatasetSpec& spec);

// The mean positions alone (num_classes x ambient_dim), for oracle checks.
Mat simplex_means(int num_classes, int ambient_dim, double separation);

// Additive Gaussian noise, then one shared uniform scale factor, then
// per-coordinate dropout. The draw layout is independent of the knobs.
Vec augment_vector(const Vec& x, Rng& rng, double noise_sigma,
                   double scale_range, double dropout_p);

// Square RGB image, channel-major planes, values in [0, 1].
struct ImageSample {
  int l = 0;
  int label = 0;
  std::vector<double> data;  // 3 * l * l

  double& at(int c, int y, int x) { return data[static_cast<std::size_t>((c * l + y) * l + x)]; }
  double at(int c, int y, int x) const { return data[static_cast<std::size_t>((c * l + y) * l + x)]; }
};

// Tiny-image augmentation policy. Blur is defined only for l > 32 and is
// skipped, draws included, at or below that size.
struct AugmentPolicy {
  double flip_p = 0.5;
  double crop_p = 0.5;
  double crop_area_lo = 0.08, crop_area_hi = 1.0;
  double aspect_lo = 0.75, aspect_hi = 4.0 / 3.0;
  double jitter_s = 0.5;  // brightness/contrast/saturation in 1 +- 0.8 s, hue +- 0.2 s
  double grayscale_p = 0.2;
  double blur_sigma_lo = 0.1, blur_sigma_hi = 2.0;
  double solarize_p = 0.2;
  double solarize_threshold = 0.5;
};

// Applies, in order: flip, random resized crop, color jitter, grayscale,
// blur (l > 32 only), solarize; clamps to [0, 1].
ImageSample augment_image(const ImageSample& img, const AugmentPolicy& policy,
                          Rng& rng);

// Two independent augmentations from substreams derived from sample_index,
// so every (seed, index) pair is bit-reproducible.
std::pair<ImageSample, ImageSample> two_views_image(const ImageSample& img,
                                                    const AugmentPolicy& policy,
                                                    const Rng& base,
                                                    std::uint64_t sample_index);

std::pair<Vec, Vec> two_views_vector(const Vec& x, double noise_sigma,
                                     double scale_range, double dropout_p,
                                     const Rng& base,
                                     std::uint64_t sample_index);

// Reads 3073-byte records: one label byte (0-9) then 3072 channel-major
// pixel bytes; pixels map to [0, 1] as byte / 255.
std::vector<ImageSample> load_cifar10_binary(const std::string& path,
                                             std::size_t max_records);

}  // namespace mio
