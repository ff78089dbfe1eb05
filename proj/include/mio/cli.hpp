// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner: versioned config documents, deterministic CSV/SVG
// emission, and the subcommand entry points used by the miolab binary.

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mio/data.hpp"
#include "mio/eval.hpp"
#include "mio/model.hpp"
#include "mio/trainer.hpp"

namespace mio {

inline constexpr const char* kMiolabVersion = "0.1.0";

// Either a synthetic vector dataset or a flattened CIFAR-10 binary file.
struct DatasetConfig {
  std::string kind = "vector";  // "vector" | "cifar"
  VectorDatasetSpec vec;
  std::string path;      // cifar only
  int max_records = 0;   // cifar only; 0 means every record
};

struct ModelConfig {
  std::vector<int> encoder_widths;
  std::vector<int> projector_widths;
  Normalization normalization = Normalization::none;
  bool use_bias = false;
};

// One experiment document. Unknown keys anywhere are rejected so a typo
// cannot silently fall back to a default.
struct ExperimentConfig {
  int schema_version = 1;
  std::string out_dir;
  DatasetConfig dataset;
  ModelConfig model;
  TrainConfig train;
  VectorViewKnobs augment;
  ProbeConfig probe;
  int checkpoint_every = 0;  // epochs between checkpoints; 0 = final only
};

// FormatError on unparseable text; ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct SweepSpec {
  std::string parameter;  // lambda | batch_size | tau | base_lr |
                          // projector_hidden_layers
  std::vector<double> values;
  ExperimentConfig base;
};

SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::string& path);

// Returns base with the named parameter replaced. Integer parameters
// reject non-integral values; projector_hidden_layers rebuilds the
// projector widths as [in, in * hidden..., out].
ExperimentConfig apply_sweep_value(const ExperimentConfig& base,
                                   const std::string& parameter, double value);

ModelSpec build_model_spec(const ModelConfig& cfg);
VectorDataset build_dataset(const DatasetConfig& cfg);
// Held-out rows from the same source: a fresh seeded draw for vector data,
// the trailing 20% of records for CIFAR files.
VectorDataset build_probe_test_dataset(const DatasetConfig& cfg);

// Shortest round-trip decimal text (std::to_chars); "nan"/"inf" pass through.
std::string format_double(double v);

// Comma-separated values, LF line endings, no quoting: cells must not
// contain commas or newlines.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void write_row(const std::vector<double>& values);
  void write_row(const std::vector<std::string>& cells);
  void flush();

 private:
  std::ofstream out_;
  std::size_t arity_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;  // one inner vector per row

  int column_index(const std::string& name) const;  // -1 when absent
  // ConfigError when the column is absent, FormatError on a non-numeric cell.
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Standalone SVG line chart, one polyline per y column; byte-identical
// output for identical input. Non-finite points are skipped. ConfigError
// names any missing column; at least two data rows are required.
std::string render_line_chart(const CsvTable& table, const std::string& x_col,
                              const std::vector<std::string>& y_cols,
                              const std::string& title);

std::uint64_t fnv1a_hash(const std::string& bytes);

// Crash-forensics record written before any long computation: command,
// config hash, effective seed, library versions. Deliberately no
// timestamps, so reruns stay byte-identical.
void write_run_manifest(const std::string& out_dir, const std::string& command,
                        const std::string& hashed_text, std::uint64_t seed);

// MIO_LAB_THREADS parsing: null/empty -> 0 (no cap), positive integer ->
// the cap, anything else -> ConfigError.
int resolve_thread_cap(const char* env_value);

// Subcommand entry points. Each returns a process exit code:
// 0 success, 1 tolerance/assertion failure, 2 usage or config error,
// 3 runtime divergence. Diagnostics go to stderr.

struct PretrainOptions {
  std::string config_path;
  std::string out_dir;  // overrides the config's out_dir when nonempty
  bool has_seed = false;
  std::uint64_t seed = 0;  // overrides train and probe seeds
};
int cmd_pretrain(const PretrainOptions& opt);

struct ProbeOptions {
  std::string config_path;
  std::string out_dir;
  std::string checkpoint_path;  // default: <out>/checkpoint.json
  bool has_seed = false;
  std::uint64_t seed = 0;
};
int cmd_probe(const ProbeOptions& opt);

struct GradcheckOptions {
  std::string loss = "all";  // mio | infonce | mio_l2 | all
  std::string mode = "both";  // dot | cosine | both
  std::vector<int> batch_sizes = {2, 4, 8};  // pairs per batch, N <= 16
  std::vector<int> dims = {4, 16};           // feature width, D <= 64
  int trials = 50;
  double tolerance = 1e-6;
  double step = 1e-5;
  std::uint64_t seed = 0;
  std::string out_dir;  // optional: gradcheck.csv + manifest when set
};
int cmd_gradcheck(const GradcheckOptions& opt);

struct MiboundOptions {
  std::vector<int> k_list = {2, 4, 8};
  int trials = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
};
int cmd_mibound(const MiboundOptions& opt);

struct GeometryOptions {
  std::vector<int> eta_list = {4, 8, 16, 32};
  int trials = 100000;
  double sigma = 1.0;  // centroid sits at (10 sigma, 0); 0 is the exact
                       // no-spread limit where every deviation angle is 0
  std::uint64_t seed = 0;
  std::string out_dir;
};
int cmd_geometry(const GeometryOptions& opt);

struct SweepOptions {
  std::string spec_path;
  std::string out_dir;  // overrides the base config's out_dir when nonempty
  bool has_seed = false;
  std::uint64_t seed = 0;  // replaces the base training seed
};
int cmd_sweep(const SweepOptions& opt);

struct PlotOptions {
  std::string csv_path;
  std::string x_column;
  std::vector<std::string> y_columns;
  std::string out_dir;
};
int cmd_plot(const PlotOptions& opt);

}  // namespace mio
