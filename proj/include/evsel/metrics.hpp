#pragma once

#include <string>

#include "evsel/lssvm.hpp"
#include "evsel/types.hpp"

namespace evsel::metrics {

enum class Measure { accuracy, map, auc };

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct EvalResult {
  Eigen::VectorXd per_class;  // K values in [0,1]
  double mean = 0.0;
  Measure measure = Measure::accuracy;
};

/// Mean per-class accuracy (recall) under argmax prediction; ties go to the
/// lowest class index. Labels must be one-hot. A class with no samples scores 0.
EvalResult accuracy(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels);

/// Non-interpolated average precision. Ranking is by descending score, stable
/// by original index on ties. Requires at least one positive.
double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties counted 0.5. Requires at least one positive and one negative.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

EvalResult mean_average_precision(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels);
EvalResult mean_auc(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels);

EvalResult evaluate(Measure measure, const lssvm::ScoreMatrix& scores, const LabelMatrix& labels);

}  // namespace evsel::metrics
