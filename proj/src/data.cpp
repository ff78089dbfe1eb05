// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>

#include "mio/error.hpp"

namespace mio {

namespace {

void check_image(const ImageSample& img) {
  if (img.l < 1) throw DomainError("image side must be >= 1");
  if (img.data.size() != static_cast<std::size_t>(3 * img.l * img.l))
    throw DimensionError("image buffer holds " +
                         std::to_string(img.data.size()) + " values, expected " +
                         std::to_string(3 * img.l * img.l));
}

void check_policy(const AugmentPolicy& p) {
  for (double prob : {p.flip_p, p.crop_p, p.grayscale_p, p.solarize_p})
    if (!(prob >= 0.0 && prob <= 1.0))
      throw ConfigError("augmentation probabilities must lie in [0, 1]");
  if (!(p.crop_area_lo > 0.0 && p.crop_area_lo <= p.crop_area_hi &&
        p.crop_area_hi <= 1.0))
    throw ConfigError("crop area range must satisfy 0 < lo <= hi <= 1");
  if (!(p.aspect_lo > 0.0 && p.aspect_lo <= p.aspect_hi))
    throw ConfigError("aspect range must satisfy 0 < lo <= hi");
  if (!(p.jitter_s >= 0.0))
    throw ConfigError("jitter strength must be >= 0");
  if (!(p.blur_sigma_lo > 0.0 && p.blur_sigma_lo <= p.blur_sigma_hi))
    throw ConfigError("blur sigma range must satisfy 0 < lo <= hi");
  if (!(p.solarize_threshold >= 0.0 && p.solarize_threshold <= 1.0))
    throw ConfigError("solarize threshold must lie in [0, 1]");
}

double luma(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r)
    h = std::fmod((g - b) / d, 6.0);
  else if (mx == g)
    h = (b - r) / d + 2.0;
  else
    h = (r - g) / d + 4.0;
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double hh = std::fmod(h, 1.0) * 6.0;
  const int sector = std::min(5, static_cast<int>(hh));
  const double f = hh - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

// Bilinear sample of one channel of a crop region, edge-clamped.
double bilinear(const ImageSample& img, int c, int y0, int x0, int ch, int cw,
                double sy, double sx) {
  const auto clamp = [](int v, int lo, int hi) {
    return std::min(hi, std::max(lo, v));
  };
  const int iy = static_cast<int>(std::floor(sy));
  const int ix = static_cast<int>(std::floor(sx));
  const double fy = sy - iy;
  const double fx = sx - ix;
  const int y_a = clamp(iy, 0, ch - 1), y_b = clamp(iy + 1, 0, ch - 1);
  const int x_a = clamp(ix, 0, cw - 1), x_b = clamp(ix + 1, 0, cw - 1);
  const double v00 = img.at(c, y0 + y_a, x0 + x_a);
  const double v01 = img.at(c, y0 + y_a, x0 + x_b);
  const double v10 = img.at(c, y0 + y_b, x0 + x_a);
  const double v11 = img.at(c, y0 + y_b, x0 + x_b);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
         fy * ((1.0 - fx) * v10 + fx * v11);
}

}  // namespace

Mat simplex_means(int num_classes, int ambient_dim, double separation) {
  if (num_classes < 1) throw DomainError("need at least one class");
  if (ambient_dim < num_classes - 1)
    throw DomainError("ambient dimension " + std::to_string(ambient_dim) +
                      " cannot embed a " + std::to_string(num_classes) +
                      "-vertex simplex (needs >= " +
                      std::to_string(num_classes - 1) + ")");
  if (!(separation >= 0.0) || !std::isfinite(separation))
    throw DomainError("separation must be finite and >= 0");
  // Orthonormal basis of the subspace orthogonal to the all-ones vector;
  // vertex images keep their pairwise distance sqrt(2), then get scaled.
  Mat means = Mat::Zero(num_classes, ambient_dim);
  const double scale = separation / std::sqrt(2.0);
  for (int j = 1; j < num_classes; ++j) {
    const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < num_classes; ++i) {
      double coord = 0.0;
      if (i < j)
        coord = 1.0 / norm;
      else if (i == j)
        coord = -static_cast<double>(j) / norm;
      means(i, j - 1) = scale * coord;
    }
  }
  return means;
}

VectorDataset make_vector_dataset(const VectorDatasetSpec& spec) {
  if (spec.num_classes < 1 || spec.samples_per_class < 1 ||
      spec.ambient_dim < 1)
    throw DomainError("dataset counts and dimension must be positive");
  if (!(spec.within_class_sigma >= 0.0))
    throw DomainError("within-class sigma must be >= 0");
  const Mat means =
      simplex_means(spec.num_classes, spec.ambient_dim, spec.class_separation);
  Rng rng(spec.seed);
  VectorDataset d;
  const int total = spec.num_classes * spec.samples_per_class;
  d.x.resize(total, spec.ambient_dim);
  d.labels.resize(static_cast<std::size_t>(total));
  int row = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (int k = 0; k < spec.ambient_dim; ++k)
        d.x(row, k) = rng.gaussian(means(c, k), spec.within_class_sigma);
      d.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return d;
}

Vec augment_vector(const Vec& x, Rng& rng, double noise_sigma,
                   double scale_range, double dropout_p) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw DomainError("noise sigma must be finite and >= 0");
  if (!(scale_range >= 0.0 && scale_range <= 1.0))
    throw DomainError("scale range must lie in [0, 1]");
  if (!(dropout_p >= 0.0 && dropout_p <= 1.0))
    throw DomainError("dropout probability must lie in [0, 1]");
  Vec out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) += rng.gaussian(0.0, noise_sigma);
  const double factor = 1.0 + rng.uniform(-scale_range, scale_range);
  if (factor != 1.0) out *= factor;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (rng.uniform() < dropout_p) out(i) = 0.0;
  return out;
}

ImageSample augment_image(const ImageSample& img, const AugmentPolicy& policy,
                          Rng& rng) {
  check_image(img);
  check_policy(policy);
  ImageSample out = img;
  const int l = out.l;

  if (rng.uniform() < policy.flip_p) {
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l / 2; ++x)
          std::swap(out.at(c, y, x), out.at(c, y, l - 1 - x));
  }

  if (rng.uniform() < policy.crop_p) {
    const double area =
        rng.uniform(policy.crop_area_lo, policy.crop_area_hi) * l * l;
    const double aspect = rng.uniform(policy.aspect_lo, policy.aspect_hi);
    int cw = static_cast<int>(std::lround(std::sqrt(area * aspect)));
    int ch = static_cast<int>(std::lround(std::sqrt(area / aspect)));
    cw = std::min(l, std::max(1, cw));
    ch = std::min(l, std::max(1, ch));
    const int x0 = static_cast<int>(rng.uniform(0.0, l - cw + 1.0));
    const int y0 = static_cast<int>(rng.uniform(0.0, l - ch + 1.0));
    ImageSample resized = out;
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < l; ++y) {
        const double sy = (y + 0.5) * ch / l - 0.5;
        for (int x = 0; x < l; ++x) {
          const double sx = (x + 0.5) * cw / l - 0.5;
          resized.at(c, y, x) = bilinear(out, c, y0, x0, ch, cw, sy, sx);
        }
      }
    }
    out = resized;
  }

  // Color jitter, applied unconditionally; each sub-step skips exact
  // identities so zero strength leaves pixels untouched bit for bit.
  {
    const double s = policy.jitter_s;
    const double fb = 1.0 + rng.uniform(-0.8 * s, 0.8 * s);
    const double fc = 1.0 + rng.uniform(-0.8 * s, 0.8 * s);
    const double fs = 1.0 + rng.uniform(-0.8 * s, 0.8 * s);
    const double hue = rng.uniform(-0.2 * s, 0.2 * s);
    if (fb != 1.0)
      for (double& v : out.data) v *= fb;
    if (fc != 1.0) {
      std::vector<double> lumas(static_cast<std::size_t>(l) * l);
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l; ++x)
          lumas[static_cast<std::size_t>(y) * l + x] =
              luma(out.at(0, y, x), out.at(1, y, x), out.at(2, y, x));
      const double gray = pairwise_sum(lumas) / static_cast<double>(l * l);
      for (double& v : out.data) v = gray + (v - gray) * fc;
    }
    if (fs != 1.0) {
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l; ++x) {
          const double g = luma(out.at(0, y, x), out.at(1, y, x), out.at(2, y, x));
          for (int c = 0; c < 3; ++c)
            out.at(c, y, x) = g + (out.at(c, y, x) - g) * fs;
        }
    }
    if (hue != 0.0) {
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l; ++x) {
          const double r0 = std::min(1.0, std::max(0.0, out.at(0, y, x)));
          const double g0 = std::min(1.0, std::max(0.0, out.at(1, y, x)));
          const double b0 = std::min(1.0, std::max(0.0, out.at(2, y, x)));
          double h, s_hsv, v;
          rgb_to_hsv(r0, g0, b0, h, s_hsv, v);
          h = std::fmod(h + hue + 1.0, 1.0);
          double r1, g1, b1;
          hsv_to_rgb(h, s_hsv, v, r1, g1, b1);
          out.at(0, y, x) = r1;
          out.at(1, y, x) = g1;
          out.at(2, y, x) = b1;
        }
    }
  }

  if (rng.uniform() < policy.grayscale_p) {
    for (int y = 0; y < l; ++y)
      for (int x = 0; x < l; ++x) {
        const double g = luma(out.at(0, y, x), out.at(1, y, x), out.at(2, y, x));
        for (int c = 0; c < 3; ++c) out.at(c, y, x) = g;
      }
  }

  if (l > 32) {
    const double sigma = rng.uniform(policy.blur_sigma_lo, policy.blur_sigma_hi);
    int k = l / 10;
    if (l % 2 != 0) k += 1;   // published kernel rule
    if (k % 2 == 0) k += 1;   // a centered kernel needs odd width
    const int half = k / 2;
    std::vector<double> kernel(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      kernel[static_cast<std::size_t>(i)] =
          std::exp(-0.5 * std::pow((i - half) / sigma, 2.0));
    const double ksum = pairwise_sum(kernel);
    for (double& v : kernel) v /= ksum;
    const auto clampi = [l](int v) { return std::min(l - 1, std::max(0, v)); };
    ImageSample tmp = out;
    for (int c = 0; c < 3; ++c)  // horizontal pass
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l; ++x) {
          double acc = 0.0;
          for (int i = 0; i < k; ++i)
            acc += kernel[static_cast<std::size_t>(i)] *
                   out.at(c, y, clampi(x + i - half));
          tmp.at(c, y, x) = acc;
        }
    for (int c = 0; c < 3; ++c)  // vertical pass
      for (int y = 0; y < l; ++y)
        for (int x = 0; x < l; ++x) {
          double acc = 0.0;
          for (int i = 0; i < k; ++i)
            acc += kernel[static_cast<std::size_t>(i)] *
                   tmp.at(c, clampi(y + i - half), x);
          out.at(c, y, x) = acc;
        }
  }

  if (rng.uniform() < policy.solarize_p) {
    for (double& v : out.data)
      if (v >= policy.solarize_threshold) v = 1.0 - v;
  }

  for (double& v : out.data) v = std::min(1.0, std::max(0.0, v));
  return out;
}

std::pair<ImageSample, ImageSample> two_views_image(const ImageSample& img,
                                                    const AugmentPolicy& policy,
                                                    const Rng& base,
                                                    std::uint64_t sample_index) {
  Rng ra = base.split(2 * sample_index);
  Rng rb = base.split(2 * sample_index + 1);
  return {augment_image(img, policy, ra), augment_image(img, policy, rb)};
}

std::pair<Vec, Vec> two_views_vector(const Vec& x, double noise_sigma,
                                     double scale_range, double dropout_p,
                                     const Rng& base,
                                     std::uint64_t sample_index) {
  Rng ra = base.split(2 * sample_index);
  Rng rb = base.split(2 * sample_index + 1);
  return {augment_vector(x, ra, noise_sigma, scale_range, dropout_p),
          augment_vector(x, rb, noise_sigma, scale_range, dropout_p)};
}

std::vector<ImageSample> load_cifar10_binary(const std::string& path,
                                             std::size_t max_records) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  constexpr std::size_t kRecord = 3073;
  std::vector<ImageSample> out;
  std::vector<unsigned char> buf(kRecord);
  for (std::size_t rec = 0; rec < max_records; ++rec) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(kRecord));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;  // clean end of file
    const std::size_t offset = rec * kRecord;
    if (got < kRecord)
      throw FormatError("truncated record at byte offset " +
                        std::to_string(offset) + " in " + path + " (got " +
                        std::to_string(got) + " of 3073 bytes)");
    if (buf[0] > 9)
      throw FormatError("label " + std::to_string(static_cast<int>(buf[0])) +
                        " out of range at byte offset " +
                        std::to_string(offset) + " in " + path);
    ImageSample img;
    img.l = 32;
    img.label = buf[0];
    img.data.resize(3 * 32 * 32);
    for (std::size_t i = 0; i < 3072; ++i)
      img.data[i] = static_cast<double>(buf[i + 1]) / 255.0;
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace mio
