// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#include "mio/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "mio/fn_geometry.hpp"
#include "mio/losses.hpp"
#include "mio/mi_oracle.hpp"
#include "mio/pairing.hpp"

namespace mio {

namespace {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) {
    throw ConfigError("an output directory is required (--out or out_dir)");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw FormatError("cannot create output directory '" + out_dir + "'");
  }
}

// ---- config document parsing -----------------------------------------

void check_object(const json& v, const std::string& where) {
  if (!v.is_object()) {
    throw ConfigError("config: " + where + " must be an object");
  }
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("config: unknown key '" + item.key() + "' in " +
                        where);
    }
  }
}

double read_double(const json& obj, const std::string& where, const char* key,
                   double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be a number");
  }
  return v.get<double>();
}

int read_int(const json& obj, const std::string& where, const char* key,
             int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be an integer");
  }
  return v.get<int>();
}

std::uint64_t read_u64(const json& obj, const std::string& where,
                       const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!(v.is_number_integer() && v.get<double>() >= 0.0)) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool read_bool(const json& obj, const std::string& where, const char* key,
               bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be a boolean");
  }
  return v.get<bool>();
}

std::string read_string(const json& obj, const std::string& where,
                        const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<int> read_int_list(const json& obj, const std::string& where,
                               const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' is required");
  }
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) {
    throw ConfigError("config: field '" + where + "." + key +
                      "' must be a non-empty array of integers");
  }
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) {
      throw ConfigError("config: field '" + where + "." + key +
                        "' must be a non-empty array of integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

DatasetConfig dataset_from_json(const json& obj) {
  check_object(obj, "dataset");
  DatasetConfig cfg;
  cfg.kind = read_string(obj, "dataset", "kind", "vector");
  if (cfg.kind == "vector") {
    check_keys(obj, "dataset",
               {"kind", "num_classes", "samples_per_class", "ambient_dim",
                "class_separation", "within_class_sigma", "seed"});
    cfg.vec.num_classes =
        read_int(obj, "dataset", "num_classes", cfg.vec.num_classes);
    cfg.vec.samples_per_class = read_int(obj, "dataset", "samples_per_class",
                                         cfg.vec.samples_per_class);
    cfg.vec.ambient_dim =
        read_int(obj, "dataset", "ambient_dim", cfg.vec.ambient_dim);
    cfg.vec.class_separation = read_double(obj, "dataset", "class_separation",
                                           cfg.vec.class_separation);
    cfg.vec.within_class_sigma = read_double(
        obj, "dataset", "within_class_sigma", cfg.vec.within_class_sigma);
    cfg.vec.seed = read_u64(obj, "dataset", "seed", cfg.vec.seed);
  } else if (cfg.kind == "cifar") {
    check_keys(obj, "dataset", {"kind", "path", "max_records"});
    cfg.path = read_string(obj, "dataset", "path", "");
    if (cfg.path.empty()) {
      throw ConfigError("config: field 'dataset.path' is required for cifar");
    }
    cfg.max_records = read_int(obj, "dataset", "max_records", 0);
    if (cfg.max_records < 0) {
      throw ConfigError("config: field 'dataset.max_records' must be >= 0");
    }
  } else {
    throw ConfigError("config: dataset.kind must be 'vector' or 'cifar'");
  }
  return cfg;
}

ModelConfig model_from_json(const json& obj) {
  check_object(obj, "model");
  check_keys(obj, "model",
             {"encoder_widths", "projector_widths", "normalization",
              "use_bias"});
  ModelConfig cfg;
  cfg.encoder_widths = read_int_list(obj, "model", "encoder_widths");
  cfg.projector_widths = read_int_list(obj, "model", "projector_widths");
  cfg.normalization =
      parse_normalization(read_string(obj, "model", "normalization", "none"));
  cfg.use_bias = read_bool(obj, "model", "use_bias", false);
  return cfg;
}

TrainConfig train_from_json(const json& obj) {
  check_object(obj, "train");
  check_keys(obj, "train",
             {"batch_size", "epochs", "base_lr", "warmup_epochs",
              "schedule_horizon", "optimizer", "momentum",
              "trust_coefficient", "loss", "tau", "lambda", "seed"});
  TrainConfig cfg;
  cfg.batch_size = read_int(obj, "train", "batch_size", cfg.batch_size);
  cfg.epochs = read_int(obj, "train", "epochs", cfg.epochs);
  cfg.base_lr = read_double(obj, "train", "base_lr", cfg.base_lr);
  cfg.warmup_epochs =
      read_int(obj, "train", "warmup_epochs", cfg.warmup_epochs);
  cfg.schedule_horizon =
      read_int(obj, "train", "schedule_horizon", cfg.schedule_horizon);
  cfg.optimizer = parse_optimizer(
      read_string(obj, "train", "optimizer", optimizer_name(cfg.optimizer)));
  cfg.momentum = read_double(obj, "train", "momentum", cfg.momentum);
  cfg.trust_coefficient =
      read_double(obj, "train", "trust_coefficient", cfg.trust_coefficient);
  cfg.loss = parse_loss(read_string(obj, "train", "loss",
                                    loss_name(cfg.loss)));
  cfg.tau = read_double(obj, "train", "tau", cfg.tau);
  cfg.lambda = read_double(obj, "train", "lambda", cfg.lambda);
  cfg.seed = read_u64(obj, "train", "seed", cfg.seed);
  return cfg;
}

VectorViewKnobs augment_from_json(const json& obj) {
  check_object(obj, "augment");
  check_keys(obj, "augment", {"noise_sigma", "scale_range", "dropout_p"});
  VectorViewKnobs knobs;
  knobs.noise_sigma =
      read_double(obj, "augment", "noise_sigma", knobs.noise_sigma);
  knobs.scale_range =
      read_double(obj, "augment", "scale_range", knobs.scale_range);
  knobs.dropout_p = read_double(obj, "augment", "dropout_p", knobs.dropout_p);
  return knobs;
}

ProbeConfig probe_from_json(const json& obj) {
  check_object(obj, "probe");
  check_keys(obj, "probe",
             {"lr0", "decay", "epochs", "batch_size", "patience", "seed"});
  ProbeConfig cfg;
  cfg.lr0 = read_double(obj, "probe", "lr0", cfg.lr0);
  cfg.decay = read_double(obj, "probe", "decay", cfg.decay);
  cfg.epochs = read_int(obj, "probe", "epochs", cfg.epochs);
  cfg.batch_size = read_int(obj, "probe", "batch_size", cfg.batch_size);
  cfg.patience = read_int(obj, "probe", "patience", cfg.patience);
  cfg.seed = read_u64(obj, "probe", "seed", cfg.seed);
  return cfg;
}

ExperimentConfig experiment_from_json(const json& doc) {
  check_object(doc, "the document root");
  check_keys(doc, "the document root",
             {"schema_version", "out_dir", "dataset", "model", "train",
              "augment", "probe", "checkpoint_every"});
  ExperimentConfig cfg;
  if (!doc.contains("schema_version")) {
    throw ConfigError("config: field 'schema_version' is required");
  }
  cfg.schema_version = read_int(doc, "root", "schema_version", 0);
  if (cfg.schema_version != 1) {
    throw ConfigError("config: schema_version must be 1");
  }
  cfg.out_dir = read_string(doc, "root", "out_dir", "");
  if (!doc.contains("dataset")) {
    throw ConfigError("config: field 'dataset' is required");
  }
  cfg.dataset = dataset_from_json(doc.at("dataset"));
  if (!doc.contains("model")) {
    throw ConfigError("config: field 'model' is required");
  }
  cfg.model = model_from_json(doc.at("model"));
  if (doc.contains("train")) cfg.train = train_from_json(doc.at("train"));
  if (doc.contains("augment")) {
    cfg.augment = augment_from_json(doc.at("augment"));
  }
  if (doc.contains("probe")) cfg.probe = probe_from_json(doc.at("probe"));
  cfg.checkpoint_every = read_int(doc, "root", "checkpoint_every", 0);
  if (cfg.checkpoint_every < 0) {
    throw ConfigError("config: checkpoint_every must be >= 0");
  }
  cfg.train.validate();
  cfg.probe.validate();
  return cfg;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
}

// ---- probe data splits ------------------------------------------------

VectorDataset flatten_images(const std::vector<ImageSample>& images,
                             std::size_t begin, std::size_t end) {
  if (begin >= end) throw ConfigError("dataset: cifar split is empty");
  const int dim = 3 * images[begin].l * images[begin].l;
  VectorDataset out;
  out.x = Mat(static_cast<Eigen::Index>(end - begin), dim);
  out.labels.resize(end - begin);
  for (std::size_t r = begin; r < end; ++r) {
    const ImageSample& img = images[r];
    if (static_cast<int>(img.data.size()) != dim) {
      throw FormatError("dataset: cifar records have mixed sizes");
    }
    for (int c = 0; c < dim; ++c) {
      out.x(static_cast<Eigen::Index>(r - begin), c) =
          img.data[static_cast<std::size_t>(c)];
    }
    out.labels[r - begin] = img.label;
  }
  return out;
}

std::vector<ImageSample> load_cifar(const DatasetConfig& cfg) {
  const std::size_t cap =
      cfg.max_records == 0 ? std::numeric_limits<std::size_t>::max()
                           : static_cast<std::size_t>(cfg.max_records);
  std::vector<ImageSample> images = load_cifar10_binary(cfg.path, cap);
  if (images.empty()) {
    throw ConfigError("dataset: '" + cfg.path + "' holds no records");
  }
  return images;
}

// Seed offset for held-out evaluation draws (golden-gamma increment, so
// nearby user seeds cannot collide with their own evaluation split).
constexpr std::uint64_t kEvalSeedOffset = 0x9E3779B97F4A7C15ULL;

VectorDataset probe_train_dataset(const DatasetConfig& cfg) {
  if (cfg.kind == "vector") return make_vector_dataset(cfg.vec);
  const std::vector<ImageSample> images = load_cifar(cfg);
  const std::size_t test_n = std::max<std::size_t>(1, images.size() / 5);
  if (images.size() <= test_n) {
    throw ConfigError("dataset: too few cifar records for a probe split");
  }
  return flatten_images(images, 0, images.size() - test_n);
}

// ---- run manifest -----------------------------------------------------

std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(bytes)));
  return std::string(buf);
}

// ---- chart rendering helpers -------------------------------------------

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf);
}

std::string fmt_tick(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::string(buf);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    const double span = hi - lo;
    const double margin = span > 0.0 ? 0.05 * span : 0.5;
    lo -= margin;
    hi += margin;
  }
  double fraction(double v) const { return (v - lo) / (hi - lo); }
};

// ---- command plumbing ---------------------------------------------------

int guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "%s: %s\n", command, e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", command, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: internal error: %s\n", command, e.what());
    return 1;
  }
}

std::vector<std::string> metrics_cells(const MetricsRow& row) {
  return {std::to_string(row.epoch),    std::to_string(row.step),
          format_double(row.loss),      format_double(row.pos_sim),
          format_double(row.neg_sim),   format_double(row.lr),
          format_double(row.seconds)};
}

std::uint64_t derive_child_seed(std::uint64_t base_seed, std::size_t index) {
  Rng rng = Rng(base_seed, 0x73776565ULL).split(index);
  return rng.next_u64();
}

}  // namespace

// ---- public config API ---------------------------------------------------

ExperimentConfig parse_experiment_config(const std::string& text) {
  return experiment_from_json(parse_json_text(text));
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

SweepSpec parse_sweep_spec(const std::string& text) {
  const json doc = parse_json_text(text);
  check_object(doc, "the document root");
  check_keys(doc, "the document root",
             {"schema_version", "parameter", "values", "base"});
  if (read_int(doc, "root", "schema_version", 0) != 1) {
    throw ConfigError("config: schema_version must be 1");
  }
  SweepSpec spec;
  spec.parameter = read_string(doc, "root", "parameter", "");
  const bool known =
      spec.parameter == "lambda" || spec.parameter == "batch_size" ||
      spec.parameter == "tau" || spec.parameter == "base_lr" ||
      spec.parameter == "projector_hidden_layers";
  if (!known) {
    throw ConfigError("sweep: unknown parameter '" + spec.parameter + "'");
  }
  if (!doc.contains("values") || !doc.at("values").is_array() ||
      doc.at("values").empty()) {
    throw ConfigError("sweep: values must be a non-empty array of numbers");
  }
  for (const json& v : doc.at("values")) {
    if (!v.is_number()) {
      throw ConfigError("sweep: values must be a non-empty array of numbers");
    }
    spec.values.push_back(v.get<double>());
  }
  if (!doc.contains("base")) {
    throw ConfigError("config: field 'base' is required");
  }
  spec.base = experiment_from_json(doc.at("base"));
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  return parse_sweep_spec(read_text_file(path));
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base,
                                   const std::string& parameter,
                                   double value) {
  ExperimentConfig out = base;
  auto as_count = [&](double lo, double hi) {
    if (!(value >= lo) || value > hi || value != std::floor(value)) {
      throw ConfigError("sweep: parameter '" + parameter +
                        "' needs an integer in [" + format_double(lo) + ", " +
                        format_double(hi) + "], got " + format_double(value));
    }
    return static_cast<int>(value);
  };
  if (parameter == "lambda") {
    out.train.lambda = value;
  } else if (parameter == "tau") {
    out.train.tau = value;
  } else if (parameter == "base_lr") {
    out.train.base_lr = value;
  } else if (parameter == "batch_size") {
    out.train.batch_size = as_count(1, 1 << 20);
  } else if (parameter == "projector_hidden_layers") {
    const int hidden = as_count(0, 8);
    if (base.model.projector_widths.size() < 2) {
      throw ConfigError("sweep: base projector needs input and output widths");
    }
    const int in = base.model.projector_widths.front();
    const int out_w = base.model.projector_widths.back();
    std::vector<int> widths = {in};
    for (int i = 0; i < hidden; ++i) widths.push_back(in);
    widths.push_back(out_w);
    out.model.projector_widths = widths;
  } else {
    throw ConfigError("sweep: unknown parameter '" + parameter + "'");
  }
  return out;
}

ModelSpec build_model_spec(const ModelConfig& cfg) {
  ModelSpec spec;
  spec.encoder =
      make_encoder_spec(cfg.encoder_widths, cfg.normalization, cfg.use_bias);
  spec.projector = make_projector_spec(cfg.projector_widths,
                                       cfg.normalization, cfg.use_bias);
  return spec;
}

VectorDataset build_dataset(const DatasetConfig& cfg) {
  if (cfg.kind == "vector") return make_vector_dataset(cfg.vec);
  const std::vector<ImageSample> images = load_cifar(cfg);
  return flatten_images(images, 0, images.size());
}

VectorDataset build_probe_test_dataset(const DatasetConfig& cfg) {
  if (cfg.kind == "vector") {
    VectorDatasetSpec spec = cfg.vec;
    spec.samples_per_class = std::max(1, spec.samples_per_class / 4);
    spec.seed += kEvalSeedOffset;
    return make_vector_dataset(spec);
  }
  const std::vector<ImageSample> images = load_cifar(cfg);
  const std::size_t test_n = std::max<std::size_t>(1, images.size() / 5);
  if (images.size() <= test_n) {
    throw ConfigError("dataset: too few cifar records for a probe split");
  }
  return flatten_images(images, images.size() - test_n, images.size());
}

// ---- CSV ------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : arity_(columns.size()) {
  if (columns.empty()) throw DomainError("csv: need at least one column");
  out_.open(path, std::ios::binary);
  if (!out_) throw FormatError("csv: cannot open '" + path + "' for writing");
  write_row(columns);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != arity_) {
    throw DimensionError("csv: row has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(arity_));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].find_first_of(",\n\r") != std::string::npos) {
      throw DomainError("csv: cell '" + cells[i] + "' contains a delimiter");
    }
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  out_ << line;
  if (!out_) throw FormatError("csv: write failed");
}

void CsvWriter::write_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  write_row(cells);
}

void CsvWriter::flush() { out_.flush(); }

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw ConfigError("csv: no column named '" + name + "'");
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& row : cells) {
    const std::string& cell = row[static_cast<std::size_t>(idx)];
    const char* s = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') {
      throw FormatError("csv: cell '" + cell + "' in column '" + name +
                        "' is not numeric");
    }
    out.push_back(v);
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  if (lines.empty()) throw FormatError("csv: '" + path + "' is empty");

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    return cells;
  };

  CsvTable table;
  table.columns = split(lines[0]);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> row = split(lines[i]);
    if (row.size() != table.columns.size()) {
      throw FormatError("csv: line " + std::to_string(i + 1) + " has " +
                        std::to_string(row.size()) + " cells, expected " +
                        std::to_string(table.columns.size()));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

// ---- SVG chart -------------------------------------------------------------

std::string render_line_chart(const CsvTable& table, const std::string& x_col,
                              const std::vector<std::string>& y_cols,
                              const std::string& title) {
  if (y_cols.empty()) throw ConfigError("plot: need at least one y column");
  if (table.cells.size() < 2) {
    throw ConfigError("plot: need at least 2 data rows");
  }
  const std::vector<double> xs = table.numeric_column(x_col);
  std::vector<std::vector<double>> series;
  series.reserve(y_cols.size());
  for (const std::string& name : y_cols) {
    series.push_back(table.numeric_column(name));
  }

  Range xr, yr;
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (std::isfinite(xs[r]) && std::isfinite(series[s][r])) {
        xr.include(xs[r]);
        yr.include(series[s][r]);
      }
    }
  }
  if (!xr.valid() || !yr.valid()) throw ConfigError("plot: no finite data");
  xr.pad();
  yr.pad();

  // Plot area in page coordinates; y grows downward in SVG.
  const double px0 = 70.0, px1 = 620.0, py0 = 430.0, py1 = 40.0;
  auto map_x = [&](double v) { return px0 + xr.fraction(v) * (px1 - px0); };
  auto map_y = [&](double v) { return py0 + yr.fraction(v) * (py1 - py0); };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2",
                                   "#17becf"};
  constexpr int kPaletteSize = 8;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
      "height=\"480\" viewBox=\"0 0 800 480\">\n";
  svg += "<rect width=\"800\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"345\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" +
         escape_xml(title) + "</text>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = static_cast<double>(i) / 4.0;
    const double gx = px0 + fx * (px1 - px0);
    const double gy = py0 + fx * (py1 - py0);
    svg += "<line x1=\"" + fmt_coord(gx) + "\" y1=\"" + fmt_coord(py1) +
           "\" x2=\"" + fmt_coord(gx) + "\" y2=\"" + fmt_coord(py0) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"" + fmt_coord(px0) + "\" y1=\"" + fmt_coord(gy) +
           "\" x2=\"" + fmt_coord(px1) + "\" y2=\"" + fmt_coord(gy) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt_coord(gx) + "\" y=\"448\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           escape_xml(fmt_tick(xr.lo + fx * (xr.hi - xr.lo))) + "</text>\n";
    svg += "<text x=\"64\" y=\"" + fmt_coord(gy + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           escape_xml(fmt_tick(yr.lo + fx * (yr.hi - yr.lo))) + "</text>\n";
  }
  svg += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"430\" "
         "stroke=\"#000000\"/>\n";
  svg += "<line x1=\"70\" y1=\"430\" x2=\"620\" y2=\"430\" "
         "stroke=\"#000000\"/>\n";
  svg += "<text x=\"345\" y=\"472\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" +
         escape_xml(x_col) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::string points;
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (!std::isfinite(xs[r]) || !std::isfinite(series[s][r])) continue;
      if (!points.empty()) points += ' ';
      points += fmt_coord(map_x(xs[r])) + "," + fmt_coord(map_y(series[s][r]));
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";

    const double ly = 56.0 + 22.0 * static_cast<double>(s);
    svg += "<line x1=\"632\" y1=\"" + fmt_coord(ly - 4.0) +
           "\" x2=\"656\" y2=\"" + fmt_coord(ly - 4.0) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"662\" y=\"" + fmt_coord(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape_xml(y_cols[s]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// ---- manifest and environment ----------------------------------------------

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_run_manifest(const std::string& out_dir, const std::string& command,
                        const std::string& hashed_text, std::uint64_t seed) {
  json m;
  m["command"] = command;
  m["config_hash"] = hash_hex(hashed_text);
  m["seed"] = seed;
  m["versions"]["miolab"] = kMiolabVersion;
  m["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);
  m["versions"]["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                          std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  write_text_file(out_dir + "/" + command + "_manifest.json",
                  m.dump(1) + "\n");
}

int resolve_thread_cap(const char* env_value) {
  if (env_value == nullptr || *env_value == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env_value, &end, 10);
  if (end == env_value || *end != '\0' || v < 1 || v > 4096) {
    throw ConfigError("MIO_LAB_THREADS must be a positive integer, got '" +
                      std::string(env_value) + "'");
  }
  return static_cast<int>(v);
}

// ---- subcommands -------------------------------------------------------------

int cmd_pretrain(const PretrainOptions& opt) {
  return guarded("pretrain", [&]() {
    const std::string text = read_text_file(opt.config_path);
    ExperimentConfig cfg = parse_experiment_config(text);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.has_seed) {
      cfg.train.seed = opt.seed;
      cfg.probe.seed = opt.seed;
    }
    const ModelSpec spec = build_model_spec(cfg.model);
    spec.validate();
    const VectorDataset data = build_dataset(cfg.dataset);
    ensure_out_dir(cfg.out_dir);
    write_run_manifest(cfg.out_dir, "pretrain", text, cfg.train.seed);

    CsvWriter metrics(cfg.out_dir + "/metrics.csv",
                      {"epoch", "step", "loss", "pos_sim", "neg_sim", "lr",
                       "seconds"});
    const PretrainResult result = pretrain(
        cfg.train, spec, data, cfg.augment,
        [&](int epoch, const ModelState& state, const MetricsRow& row) {
          metrics.write_row(metrics_cells(row));
          metrics.flush();
          if (cfg.checkpoint_every > 0 &&
              (epoch + 1) % cfg.checkpoint_every == 0) {
            char name[40];
            std::snprintf(name, sizeof name, "checkpoint_epoch_%04d.json",
                          epoch);
            save_checkpoint(cfg.out_dir + "/" + name, spec, state,
                            cfg.train.seed);
          }
        });
    save_checkpoint(cfg.out_dir + "/checkpoint.json", spec, result.state,
                    cfg.train.seed);
    if (result.metrics.empty()) {
      std::printf("pretrain: 0 epochs requested, checkpoint holds the "
                  "initialization\n");
    } else {
      std::printf("pretrain: %zu epochs, final loss %s, similarity gap %s\n",
                  result.metrics.size(),
                  format_double(result.metrics.back().loss).c_str(),
                  format_double(result.metrics.back().pos_sim -
                                result.metrics.back().neg_sim)
                      .c_str());
    }
    return 0;
  });
}

int cmd_probe(const ProbeOptions& opt) {
  return guarded("probe", [&]() {
    const std::string text = read_text_file(opt.config_path);
    ExperimentConfig cfg = parse_experiment_config(text);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.has_seed) cfg.probe.seed = opt.seed;
    const std::string ck_path = opt.checkpoint_path.empty()
                                    ? cfg.out_dir + "/checkpoint.json"
                                    : opt.checkpoint_path;
    const Checkpoint ck = load_checkpoint(ck_path);
    ck.spec.validate();

    const VectorDataset train = probe_train_dataset(cfg.dataset);
    const VectorDataset test = build_probe_test_dataset(cfg.dataset);
    if (train.x.cols() != ck.spec.input_dim()) {
      throw DimensionError(
          "probe: checkpoint expects input width " +
          std::to_string(ck.spec.input_dim()) + ", dataset has " +
          std::to_string(train.x.cols()));
    }
    ensure_out_dir(cfg.out_dir);
    write_run_manifest(cfg.out_dir, "probe", text, cfg.probe.seed);

    const Mat train_features = extract_features(ck.state, ck.spec, train.x);
    const Mat test_features = extract_features(ck.state, ck.spec, test.x);
    const ProbeReport report =
        linear_probe(train_features, train.labels, test_features, test.labels,
                     cfg.probe);

    CsvWriter out(cfg.out_dir + "/probe.csv",
                  {"train_accuracy", "test_accuracy", "epochs_run"});
    out.write_row({format_double(report.train_accuracy),
                   format_double(report.test_accuracy),
                   std::to_string(report.epochs_run)});
    CsvWriter val(cfg.out_dir + "/probe_val.csv", {"epoch", "val_accuracy"});
    for (std::size_t i = 0; i < report.val_accuracy.size(); ++i) {
      val.write_row({std::to_string(i), format_double(report.val_accuracy[i])});
    }
    std::printf("probe: train %s, test %s, %d epochs\n",
                format_double(report.train_accuracy).c_str(),
                format_double(report.test_accuracy).c_str(),
                report.epochs_run);
    return 0;
  });
}

int cmd_gradcheck(const GradcheckOptions& opt) {
  return guarded("gradcheck", [&]() {
    if (opt.trials < 1) throw ConfigError("gradcheck: trials must be >= 1");
    if (!(opt.tolerance > 0.0)) {
      throw ConfigError("gradcheck: tolerance must be > 0");
    }
    if (!(opt.step >= 1e-7 && opt.step <= 1e-3)) {
      throw ConfigError("gradcheck: step must lie in [1e-7, 1e-3]");
    }
    if (opt.batch_sizes.empty() || opt.dims.empty()) {
      throw ConfigError("gradcheck: batch sizes and dims must be non-empty");
    }
    for (int n : opt.batch_sizes) {
      if (n < 1 || n > 16) {
        throw ConfigError("gradcheck: batch sizes must lie in [1, 16]");
      }
    }
    for (int d : opt.dims) {
      if (d < 1 || d > 64) {
        throw ConfigError("gradcheck: dims must lie in [1, 64]");
      }
    }

    struct LossEntry {
      const char* name;
      LossReport (*value)(const Mat&, const PairIndexSet&, const LossConfig&);
      LossReport (*grad)(const Mat&, const PairIndexSet&, const LossConfig&);
    };
    static const LossEntry kLosses[] = {
        {"mio", mio_loss, mio_grad_z},
        {"infonce", infonce_loss, infonce_grad_z},
        {"mio_l2", mio_l2_loss, mio_l2_loss},
    };
    std::vector<const LossEntry*> losses;
    for (const LossEntry& e : kLosses) {
      if (opt.loss == "all" || opt.loss == e.name) losses.push_back(&e);
    }
    if (losses.empty()) {
      throw ConfigError("gradcheck: loss must be mio, infonce, mio_l2, or "
                        "all; got '" + opt.loss + "'");
    }
    std::vector<SimilarityMode> modes;
    if (opt.mode == "dot" || opt.mode == "both") {
      modes.push_back(SimilarityMode::dot);
    }
    if (opt.mode == "cosine" || opt.mode == "both") {
      modes.push_back(SimilarityMode::cosine);
    }
    if (modes.empty()) {
      throw ConfigError("gradcheck: mode must be dot, cosine, or both; got '" +
                        opt.mode + "'");
    }

    std::ostringstream invocation;
    invocation << "gradcheck loss=" << opt.loss << " mode=" << opt.mode
               << " trials=" << opt.trials << " tolerance=" << opt.tolerance
               << " step=" << opt.step << " seed=" << opt.seed;

    struct Worst {
      double rel = 0.0;
      int trial = -1;
      long long entry = -1;
    };
    std::vector<std::vector<Worst>> worst(
        losses.size(), std::vector<Worst>(modes.size()));

    for (int t = 0; t < opt.trials; ++t) {
      const int n = opt.batch_sizes[static_cast<std::size_t>(t) %
                                    opt.batch_sizes.size()];
      const int d =
          opt.dims[(static_cast<std::size_t>(t) / opt.batch_sizes.size()) %
                   opt.dims.size()];
      Rng rng(opt.seed, static_cast<std::uint64_t>(t));
      Mat z(2 * n, d);
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
          z(r, c) = rng.gaussian(0.0, 1.0);
        }
      }
      const PairIndexSet pairs = build_pairs(n);

      for (std::size_t li = 0; li < losses.size(); ++li) {
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          const LossConfig lc{0.5, 1.0, modes[mi]};
          const LossReport analytic = losses[li]->grad(z, pairs, lc);
          Mat probe = z;
          for (long long i = 0; i < z.size(); ++i) {
            const double keep = probe.data()[i];
            probe.data()[i] = keep + opt.step;
            const double fp = losses[li]->value(probe, pairs, lc).value;
            probe.data()[i] = keep - opt.step;
            const double fm = losses[li]->value(probe, pairs, lc).value;
            probe.data()[i] = keep;
            const double fd = (fp - fm) / (2.0 * opt.step);
            const double an = analytic.grad_z.data()[i];
            const double rel = std::abs(fd - an) /
                               std::max({std::abs(fd), std::abs(an), 1e-3});
            if (rel > worst[li][mi].rel) {
              worst[li][mi] = {rel, t, i};
            }
          }
        }
      }
    }

    bool breached = false;
    std::printf("%-8s %-7s %-22s\n", "loss", "mode", "max_rel_err");
    for (std::size_t li = 0; li < losses.size(); ++li) {
      for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        const char* mode_name =
            modes[mi] == SimilarityMode::dot ? "dot" : "cosine";
        std::printf("%-8s %-7s %-22s\n", losses[li]->name, mode_name,
                    format_double(worst[li][mi].rel).c_str());
        if (worst[li][mi].rel > opt.tolerance) {
          breached = true;
          std::fprintf(stderr,
                       "gradcheck: FAIL loss=%s mode=%s seed=%llu trial=%d "
                       "coordinate=%lld rel=%s\n",
                       losses[li]->name, mode_name,
                       static_cast<unsigned long long>(opt.seed),
                       worst[li][mi].trial, worst[li][mi].entry,
                       format_double(worst[li][mi].rel).c_str());
        }
      }
    }

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      write_run_manifest(opt.out_dir, "gradcheck", invocation.str(), opt.seed);
      CsvWriter csv(opt.out_dir + "/gradcheck.csv",
                    {"loss", "mode", "max_rel_err"});
      for (std::size_t li = 0; li < losses.size(); ++li) {
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          csv.write_row({losses[li]->name,
                         modes[mi] == SimilarityMode::dot ? "dot" : "cosine",
                         format_double(worst[li][mi].rel)});
        }
      }
    }
    return breached ? 1 : 0;
  });
}

int cmd_mibound(const MiboundOptions& opt) {
  return guarded("mibound", [&]() {
    if (opt.k_list.empty()) throw ConfigError("mibound: k list is empty");
    for (int k : opt.k_list) {
      if (k < 2 || k > 64) {
        throw ConfigError("mibound: k must lie in [2, 64], got " +
                          std::to_string(k));
      }
    }
    if (opt.trials < 0) throw ConfigError("mibound: trials must be >= 0");

    std::ostringstream invocation;
    invocation << "mibound trials=" << opt.trials << " seed=" << opt.seed
               << " k=";
    for (std::size_t i = 0; i < opt.k_list.size(); ++i) {
      invocation << (i ? "," : "") << opt.k_list[i];
    }

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      write_run_manifest(opt.out_dir, "mibound", invocation.str(), opt.seed);
    }
    std::unique_ptr<CsvWriter> csv;
    if (!opt.out_dir.empty()) {
      csv = std::make_unique<CsvWriter>(
          opt.out_dir + "/mibound.csv",
          std::vector<std::string>{"k", "loss", "i_pos", "i_neg_tilde",
                                   "slack"});
    }

    double min_slack = std::numeric_limits<double>::infinity();
    long long rows = 0;
    auto emit = [&](int k, const BoundReport& r) {
      min_slack = std::min(min_slack, r.slack);
      ++rows;
      if (csv) {
        csv->write_row({std::to_string(k), format_double(r.loss),
                        format_double(r.i_pos), format_double(r.i_neg_tilde),
                        format_double(r.slack)});
      }
    };

    for (int k : opt.k_list) {
      // Independent uniform joint first: its slack is the 2 ln 2 landmark.
      const Mat uniform =
          Mat::Constant(k, k, 1.0 / (static_cast<double>(k) * k));
      emit(k, verify_bound(make_joint(uniform)));
      Rng rng(opt.seed, static_cast<std::uint64_t>(k));
      for (int t = 0; t < opt.trials; ++t) {
        emit(k, verify_bound(random_dirichlet_joint(k, rng)));
      }
    }
    std::printf("mibound: %lld joints, min slack %s\n", rows,
                format_double(min_slack).c_str());
    return min_slack < -1e-12 ? 1 : 0;
  });
}

int cmd_geometry(const GeometryOptions& opt) {
  return guarded("geometry", [&]() {
    if (opt.eta_list.empty()) throw ConfigError("geometry: eta list is empty");
    std::vector<int> etas = opt.eta_list;
    std::sort(etas.begin(), etas.end());
    etas.erase(std::unique(etas.begin(), etas.end()), etas.end());
    for (int eta : etas) {
      if (eta < 1 || eta > 4096) {
        throw ConfigError("geometry: eta must lie in [1, 4096], got " +
                          std::to_string(eta));
      }
    }
    if (opt.trials < 1) throw ConfigError("geometry: trials must be >= 1");
    if (!(std::isfinite(opt.sigma) && opt.sigma >= 0.0)) {
      throw ConfigError("geometry: sigma must be finite and >= 0");
    }

    std::ostringstream invocation;
    invocation << "geometry trials=" << opt.trials << " sigma=" << opt.sigma
               << " seed=" << opt.seed << " eta=";
    for (std::size_t i = 0; i < etas.size(); ++i) {
      invocation << (i ? "," : "") << etas[i];
    }

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      write_run_manifest(opt.out_dir, "geometry", invocation.str(), opt.seed);
    }
    std::unique_ptr<CsvWriter> csv;
    if (!opt.out_dir.empty()) {
      csv = std::make_unique<CsvWriter>(
          opt.out_dir + "/geometry.csv",
          std::vector<std::string>{"eta", "mean_abs_phi", "max_abs_phi",
                                   "frac_cos_positive"});
    }

    std::vector<PhiStats> stats;
    if (opt.sigma == 0.0) {
      // Zero spread is the exact limit: every false negative sits on the
      // centroid, so the resultant never deviates from its ray.
      for (std::size_t i = 0; i < etas.size(); ++i) {
        stats.push_back(PhiStats{0.0, 0.0, 1.0});
      }
    } else {
      for (int eta : etas) {
        GeometryConfig cfg;
        cfg.x_o = 10.0 * opt.sigma;
        cfg.y_o = 0.0;
        cfg.sigma = opt.sigma;
        cfg.eta = eta;
        cfg.t_p = eta + 2;
        cfg.weight_mode = WeightMode::uniform_p;
        Rng rng(opt.seed, static_cast<std::uint64_t>(eta));
        stats.push_back(monte_carlo_phi(cfg, opt.trials, rng));
      }
    }

    for (std::size_t i = 0; i < etas.size(); ++i) {
      std::printf("geometry: eta=%d mean|phi|=%s max|phi|=%s frac+=%s\n",
                  etas[i], format_double(stats[i].mean_abs_phi).c_str(),
                  format_double(stats[i].max_abs_phi).c_str(),
                  format_double(stats[i].frac_cos_positive).c_str());
      if (csv) {
        csv->write_row({std::to_string(etas[i]),
                        format_double(stats[i].mean_abs_phi),
                        format_double(stats[i].max_abs_phi),
                        format_double(stats[i].frac_cos_positive)});
      }
    }

    bool ok = true;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      if (stats[i].frac_cos_positive != 1.0 ||
          !(stats[i].max_abs_phi < M_PI / 2.0)) {
        ok = false;
        std::fprintf(stderr,
                     "geometry: regime violated at eta=%d (frac+=%s, "
                     "max|phi|=%s)\n",
                     etas[i], format_double(stats[i].frac_cos_positive).c_str(),
                     format_double(stats[i].max_abs_phi).c_str());
      }
      if (i > 0 && opt.sigma > 0.0 &&
          !(stats[i].mean_abs_phi < stats[i - 1].mean_abs_phi)) {
        ok = false;
        std::fprintf(stderr,
                     "geometry: mean|phi| not decreasing from eta=%d to "
                     "eta=%d\n",
                     etas[i - 1], etas[i]);
      }
    }
    return ok ? 0 : 1;
  });
}

namespace {

struct ChildOutcome {
  std::string status = "ok";
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double sim_gap = std::numeric_limits<double>::quiet_NaN();
  double train_accuracy = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
};

ChildOutcome run_sweep_child(const ExperimentConfig& child) {
  ChildOutcome out;
  const ModelSpec spec = build_model_spec(child.model);
  spec.validate();
  const VectorDataset data = build_dataset(child.dataset);
  const PretrainResult result =
      pretrain(child.train, spec, data, child.augment);
  if (!result.metrics.empty()) {
    out.final_loss = result.metrics.back().loss;
    out.sim_gap =
        result.metrics.back().pos_sim - result.metrics.back().neg_sim;
  }
  const VectorDataset probe_train = probe_train_dataset(child.dataset);
  const VectorDataset probe_test = build_probe_test_dataset(child.dataset);
  const Mat train_features =
      extract_features(result.state, spec, probe_train.x);
  const Mat test_features = extract_features(result.state, spec, probe_test.x);
  const ProbeReport report =
      linear_probe(train_features, probe_train.labels, test_features,
                   probe_test.labels, child.probe);
  out.train_accuracy = report.train_accuracy;
  out.test_accuracy = report.test_accuracy;
  return out;
}

}  // namespace

int cmd_sweep(const SweepOptions& opt) {
  return guarded("sweep", [&]() {
    const std::string text = read_text_file(opt.spec_path);
    const SweepSpec spec = parse_sweep_spec(text);
    const std::string out_dir =
        opt.out_dir.empty() ? spec.base.out_dir : opt.out_dir;
    const std::uint64_t base_seed =
        opt.has_seed ? opt.seed : spec.base.train.seed;
    ensure_out_dir(out_dir);
    write_run_manifest(out_dir, "sweep", text, base_seed);

    CsvWriter csv(out_dir + "/sweep.csv",
                  {"parameter", "value", "status", "final_loss", "sim_gap",
                   "train_accuracy", "test_accuracy"});
    bool any_failed = false;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      ChildOutcome outcome;
      try {
        ExperimentConfig child =
            apply_sweep_value(spec.base, spec.parameter, spec.values[i]);
        child.train.seed = derive_child_seed(base_seed, i);
        child.train.validate();
        outcome = run_sweep_child(child);
      } catch (const DivergenceError& e) {
        outcome.status = "divergence";
        any_failed = true;
        std::fprintf(stderr, "sweep: value %s diverged: %s\n",
                     format_double(spec.values[i]).c_str(), e.what());
      } catch (const Error& e) {
        outcome.status = "error";
        any_failed = true;
        std::fprintf(stderr, "sweep: value %s failed: %s\n",
                     format_double(spec.values[i]).c_str(), e.what());
      }
      csv.write_row({spec.parameter, format_double(spec.values[i]),
                     outcome.status, format_double(outcome.final_loss),
                     format_double(outcome.sim_gap),
                     format_double(outcome.train_accuracy),
                     format_double(outcome.test_accuracy)});
      csv.flush();
      std::printf("sweep: %s=%s status=%s gap=%s test_accuracy=%s\n",
                  spec.parameter.c_str(),
                  format_double(spec.values[i]).c_str(),
                  outcome.status.c_str(), format_double(outcome.sim_gap).c_str(),
                  format_double(outcome.test_accuracy).c_str());
    }
    return any_failed ? 1 : 0;
  });
}

int cmd_plot(const PlotOptions& opt) {
  return guarded("plot", [&]() {
    if (opt.y_columns.empty()) {
      throw ConfigError("plot: need at least one y column");
    }
    const CsvTable table = read_csv(opt.csv_path);
    const std::string stem =
        std::filesystem::path(opt.csv_path).stem().string();
    const std::string svg =
        render_line_chart(table, opt.x_column, opt.y_columns, stem);
    ensure_out_dir(opt.out_dir);
    // Hash the column selection plus the selected cells: exactly the chart's
    // inputs, independent of file location and of any unplotted wall-clock
    // columns.
    std::ostringstream hashed;
    hashed << "plot x=" << opt.x_column << " y=";
    for (std::size_t i = 0; i < opt.y_columns.size(); ++i) {
      hashed << (i ? "," : "") << opt.y_columns[i];
    }
    std::vector<std::string> selected = {opt.x_column};
    selected.insert(selected.end(), opt.y_columns.begin(),
                    opt.y_columns.end());
    for (const std::string& name : selected) {
      hashed << '\n' << name;
      const int idx = table.column_index(name);
      for (const auto& row : table.cells) {
        hashed << ',' << row[static_cast<std::size_t>(idx)];
      }
    }
    write_run_manifest(opt.out_dir, "plot", hashed.str(), 0);
    write_text_file(opt.out_dir + "/" + stem + "_chart.svg", svg);
    std::printf("plot: wrote %s_chart.svg (%zu series)\n", stem.c_str(),
                opt.y_columns.size());
    return 0;
  });
}

}  // namespace mio
