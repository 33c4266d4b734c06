#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "evsel/metrics.hpp"
#include "evsel/types.hpp"

namespace evsel::dataio {

// FBNK: magic "FBNK", version u32 LE, D u64 LE, N u64 LE, D*N f64 LE row-major.
// The format carries no name; read_bank names the bank after the file stem.
void write_bank(const FeatureBank& bank, const std::string& path);
FeatureBank read_bank(const std::string& path);

// LBLS: magic "LBLS", version u32 LE, N u64 LE, K u64 LE, N*K bytes in {0,1} row-major.
void write_labels(const LabelMatrix& labels, const std::string& path);
LabelMatrix read_labels(const std::string& path);

// RFC-4180 CSV, one matrix row per line, optional header row (detected by a
// non-numeric first line). Cells parsed as f64.
FeatureBank read_bank_csv(const std::string& path);

void write_scores_csv(const Eigen::MatrixXd& scores, const std::string& path);
Eigen::MatrixXd read_scores_csv(const std::string& path);

struct NormalizeOutcome {
  FeatureBank bank;
  std::size_t negative_entries = 0;  // reported as a warning, not an error
};

/// Scales every column to unit Euclidean norm. A zero column is an error.
NormalizeOutcome l2_normalize_columns(const FeatureBank& bank);

struct SynthSpec {
  Index n = 0;
  Index d = 0;
  Index k = 0;
  double noise_level = 0.0;
  double informative_fraction = 0.5;  // fraction of dims carrying class signal
  std::uint64_t seed = 0;
  bool nonneg_l2 = false;  // nonnegative entries + unit columns (fixed-point existence regime)
};

struct SynthData {
  FeatureBank bank;
  LabelMatrix labels;
  std::vector<Index> test_indices;  // deterministic 20% holdout
};

/// Class-dependent mean directions on the informative dims plus seeded
/// Gaussian noise; one-hot labels assigned round-robin. Deterministic per seed.
SynthData generate_synthetic(const SynthSpec& spec);

/// Features for externally supplied labels (used to build multi-bank candidate
/// sets over shared samples). `class_groups`, when non-empty, maps each class
/// to a mean-direction group: classes in the same group are indistinguishable
/// in this bank, so banks with different groupings carry complementary signal.
FeatureBank generate_synthetic_bank(const SynthSpec& spec, const LabelMatrix& labels,
                                    const std::vector<int>& class_groups = {});

FeatureBank select_columns(const FeatureBank& bank, const std::vector<Index>& indices);
LabelMatrix select_rows(const LabelMatrix& labels, const std::vector<Index>& indices);

struct DatasetManifest {
  std::string task;
  std::vector<std::pair<std::string, std::string>> banks;  // (name, resolved path)
  std::string labels_path;
  TaskMode mode = TaskMode::single_label;
  metrics::Measure measure = metrics::Measure::accuracy;
  bool has_split = false;
  std::vector<Index> train_indices;
  std::vector<Index> test_indices;
};

// JSON manifest; relative paths resolve against the manifest's directory.
// Every referenced file is stat'ed and split indices are checked (in-range,
// disjoint) before any computation starts.
DatasetManifest load_manifest(const std::string& path);
void write_manifest(const DatasetManifest& manifest, const std::string& path);

struct Dataset {
  std::vector<FeatureBank> banks;
  LabelMatrix labels;
  DatasetManifest manifest;
};

Dataset load_dataset(const DatasetManifest& manifest);

}  // namespace evsel::dataio
