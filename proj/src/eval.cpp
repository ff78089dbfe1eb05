// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mio {

namespace {

std::vector<int> shuffled(int n, Rng rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = std::min(
        i, static_cast<int>(rng.uniform() * static_cast<double>(i + 1)));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

int argmax_row(const Mat& logits, Eigen::Index r) {
  int best = 0;
  for (Eigen::Index c = 1; c < logits.cols(); ++c) {
    if (logits(r, c) > logits(r, best)) best = static_cast<int>(c);
  }
  return best;
}

double accuracy(const Mat& x, const std::vector<int>& y, const Mat& w,
                const Vec& b) {
  if (x.rows() == 0) return 0.0;
  Mat logits = x * w.transpose();
  logits.rowwise() += b.transpose();
  long long correct = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (argmax_row(logits, r) == y[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

void check_labeled(const Mat& x, const std::vector<int>& y,
                   const char* which) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DimensionError(std::string("linear_probe: ") + which +
                         " rows and labels differ");
  }
  for (int label : y) {
    if (label < 0) {
      throw DomainError(std::string("linear_probe: ") + which +
                        " labels must be nonnegative");
    }
  }
}

}  // namespace

void ProbeConfig::validate() const {
  if (!(lr0 > 0.0)) throw ConfigError("probe lr0 must be > 0");
  if (!(decay > 0.0) || decay > 1.0) {
    throw ConfigError("probe decay must lie in (0, 1]");
  }
  if (epochs < 1) throw ConfigError("probe epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("probe batch_size must be >= 1");
  if (patience < 1) throw ConfigError("probe patience must be >= 1");
}

Mat extract_features(const ModelState& state, const ModelSpec& spec,
                     const Mat& x) {
  return forward(state, spec, x).h;
}

ProbeReport linear_probe(const Mat& train_x, const std::vector<int>& train_y,
                         const Mat& test_x, const std::vector<int>& test_y,
                         const ProbeConfig& cfg) {
  cfg.validate();
  check_labeled(train_x, train_y, "train");
  check_labeled(test_x, test_y, "test");
  if (test_x.cols() != train_x.cols()) {
    throw DimensionError("linear_probe: train/test widths differ");
  }
  const int n = static_cast<int>(train_x.rows());
  if (n < 2) throw DomainError("linear_probe: need at least 2 training rows");

  int num_classes = 0;
  for (int label : train_y) num_classes = std::max(num_classes, label + 1);
  {
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    int distinct = 0;
    for (int label : train_y) {
      if (!seen[static_cast<std::size_t>(label)]) {
        seen[static_cast<std::size_t>(label)] = true;
        ++distinct;
      }
    }
    if (distinct < 2) {
      throw DomainError("linear_probe: training labels hold a single class");
    }
  }
  for (int label : test_y) num_classes = std::max(num_classes, label + 1);

  // Seeded 10% validation split (at least one row) held out of training.
  const std::vector<int> split_order = shuffled(n, Rng(cfg.seed, 0));
  const int val_n = std::max(1, n / 10);
  const std::vector<int> val_idx(split_order.begin(),
                                 split_order.begin() + val_n);
  const std::vector<int> fit_idx(split_order.begin() + val_n,
                                 split_order.end());
  const int fit_n = static_cast<int>(fit_idx.size());

  Mat val_x(val_n, train_x.cols());
  std::vector<int> val_y(static_cast<std::size_t>(val_n));
  for (int i = 0; i < val_n; ++i) {
    val_x.row(i) = train_x.row(val_idx[static_cast<std::size_t>(i)]);
    val_y[static_cast<std::size_t>(i)] =
        train_y[static_cast<std::size_t>(val_idx[static_cast<std::size_t>(i)])];
  }

  const Eigen::Index dim = train_x.cols();
  Mat w = Mat::Zero(num_classes, dim);
  Vec b = Vec::Zero(num_classes);
  Mat best_w = w;
  Vec best_b = b;
  double best_val = -1.0;
  int best_epoch = -1;

  ProbeReport report;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr0 * std::pow(cfg.decay, epoch);
    const std::vector<int> order = shuffled(
        fit_n, Rng(cfg.seed, 1).split(static_cast<std::uint64_t>(epoch)));
    for (int start = 0; start < fit_n; start += cfg.batch_size) {
      const int rows = std::min(cfg.batch_size, fit_n - start);
      Mat xb(rows, dim);
      std::vector<int> yb(static_cast<std::size_t>(rows));
      for (int r = 0; r < rows; ++r) {
        const int src = fit_idx[static_cast<std::size_t>(
            order[static_cast<std::size_t>(start + r)])];
        xb.row(r) = train_x.row(src);
        yb[static_cast<std::size_t>(r)] = train_y[static_cast<std::size_t>(src)];
      }
      Mat logits = xb * w.transpose();
      logits.rowwise() += b.transpose();
      Mat probs(rows, num_classes);
      for (int r = 0; r < rows; ++r) {
        const double peak = logits.row(r).maxCoeff();
        probs.row(r) = (logits.row(r).array() - peak).exp();
        probs.row(r) /= probs.row(r).sum();
      }
      for (int r = 0; r < rows; ++r) {
        probs(r, yb[static_cast<std::size_t>(r)]) -= 1.0;
      }
      probs /= static_cast<double>(rows);
      w -= lr * (probs.transpose() * xb);
      b -= lr * probs.colwise().sum().transpose();
    }

    const double val_acc = accuracy(val_x, val_y, w, b);
    report.val_accuracy.push_back(val_acc);
    ++report.epochs_run;
    if (val_acc > best_val) {
      best_val = val_acc;
      best_epoch = epoch;
      best_w = w;
      best_b = b;
    } else if (epoch - best_epoch >= cfg.patience) {
      break;
    }
  }

  report.train_accuracy = accuracy(train_x, train_y, best_w, best_b);
  report.test_accuracy = accuracy(test_x, test_y, best_w, best_b);
  return report;
}

SimilarityStats pairwise_similarity_stats(const Mat& z,
                                          const PairIndexSet& pairs) {
  if (z.rows() != 2LL * pairs.n) {
    throw DimensionError("pairwise_similarity_stats: z rows must equal 2N");
  }
  std::vector<double> pos;
  pos.reserve(pairs.positives.size());
  for (const auto& [a, p] : pairs.positives) {
    pos.push_back(
        cosine_similarity(z.row(a).transpose(), z.row(p).transpose()));
  }
  std::vector<double> neg;
  neg.reserve(static_cast<std::size_t>(pairs.t_n));
  for (int a = 0; a < 2 * pairs.n; ++a) {
    for (int j : pairs.negatives_by_anchor[static_cast<std::size_t>(a)]) {
      neg.push_back(
          cosine_similarity(z.row(a).transpose(), z.row(j).transpose()));
    }
  }
  SimilarityStats stats;
  stats.mean_pos = pairwise_sum(pos) / static_cast<double>(pos.size());
  stats.mean_neg =
      neg.empty() ? 0.0 : pairwise_sum(neg) / static_cast<double>(neg.size());
  stats.gap = stats.mean_pos - stats.mean_neg;
  return stats;
}

}  // namespace mio
