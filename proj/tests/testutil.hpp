#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "evsel/dataio.hpp"
#include "evsel/rng.hpp"
#include "evsel/types.hpp"

namespace testutil {

using evsel::FeatureBank;
using evsel::Index;
using evsel::LabelMatrix;

inline FeatureBank random_bank(std::uint64_t seed, Index d, Index n,
                               const std::string& name = "rand") {
  evsel::rng::Generator gen(seed);
  Eigen::MatrixXd data(d, n);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < n; ++j) data(i, j) = gen.normal();
  return FeatureBank::create(name, std::move(data));
}

inline LabelMatrix random_binary_labels(std::uint64_t seed, Index n, Index k) {
  evsel::rng::Generator gen(seed);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(n, k);
  for (;;) {
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < k; ++c) y(i, c) = gen.uniform() < 0.35 ? 1 : 0;
    bool ok = true;
    for (Index c = 0; c < k && ok; ++c) {
      Index pos = 0;
      for (Index i = 0; i < n; ++i) pos += y(i, c);
      ok = pos > 0 && pos < n;
    }
    if (ok) break;
  }
  return LabelMatrix{std::move(y)};
}

inline LabelMatrix one_hot_labels(Index n, Index k) {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y =
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, k);
  for (Index i = 0; i < n; ++i) y(i, i % k) = 1;
  return LabelMatrix{std::move(y)};
}

// Fixed-point-existence regime: nonnegative L2-normalized columns, binary
// targets, at least two positives per class.
inline evsel::dataio::SynthData theorem_regime_problem(std::uint64_t seed, Index n = 200,
                                                       Index d = 50, Index k = 3,
                                                       double noise = 0.5) {
  evsel::dataio::SynthSpec spec;
  spec.n = n;
  spec.d = d;
  spec.k = k;
  spec.noise_level = noise;
  spec.informative_fraction = 0.6;
  spec.seed = seed;
  spec.nonneg_l2 = true;
  return evsel::dataio::generate_synthetic(spec);
}

// The 2x2 identity design: X = I2, y = [1, 0].
inline FeatureBank identity_bank() {
  return FeatureBank::create("identity", Eigen::MatrixXd::Identity(2, 2));
}

inline LabelMatrix identity_labels() {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(2, 1);
  y << 1, 0;
  return LabelMatrix{y};
}

// X = {e1, e1, e2} (D=2, N=3), y = [1, 1, 0]: the worked three-column case.
inline FeatureBank three_column_bank() {
  Eigen::MatrixXd x(2, 3);
  x << 1, 1, 0,
       0, 0, 1;
  return FeatureBank::create("three", x);
}

inline LabelMatrix three_column_labels() {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(3, 1);
  y << 1, 1, 0;
  return LabelMatrix{y};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("evsel_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
