#pragma once

#include <string>
#include <vector>

#include "evsel/evidence.hpp"
#include "evsel/spectral.hpp"
#include "evsel/types.hpp"

namespace evsel::lssvm {

struct ClassifierModel {
  Eigen::MatrixXd weights;   // D x K, column k = w^(k)
  Eigen::VectorXd lambdas;   // K
  std::vector<evidence::EvidenceResult> per_class;
  double overall_evidence = 0.0;  // sum over classes of the final log evidence
  std::string bank_signature;     // bank name(s) in concatenation order, '+'-joined
  Index d = 0;
  Index k = 0;
};

struct ScoreMatrix {
  Eigen::MatrixXd data;  // N' x K, entry (n, k) = x_n^T w^(k)

  Index count() const { return data.rows(); }
  Index classes() const { return data.cols(); }
};

struct TrainConfig {
  bool accept_unconverged = false;  // default: an unconverged class aborts training
  int workers = 1;
};

/// w = U (S + lambda I)^-1 h^(k).
Eigen::VectorXd solve_weights(const spectral::EigenBasis& basis, Index k, double lambda);

/// One basis build, K independent lambda optimizations, K weight solves.
ClassifierModel train(const FeatureBank& bank, const LabelMatrix& labels,
                      const evidence::OptimOptions& opts = {}, const TrainConfig& cfg = {});

/// Sum of per-class final log evidences, accumulated in ascending class order.
double overall_evidence(const std::vector<evidence::EvidenceResult>& per_class);

ScoreMatrix predict_scores(const ClassifierModel& model, const FeatureBank& bank);

/// Element-wise mean of equally shaped score matrices.
ScoreMatrix average_scores(const std::vector<ScoreMatrix>& scores);

// BMDL binary model format (little-endian throughout): magic "BMDL",
// version u32, D u64, K u64, K lambdas f64, D*K weights f64 column-major by
// class, overall_evidence f64, u64 length-prefixed UTF-8 bank signature.
// Per-class traces are not serialized.
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace evsel::lssvm
