#include "evsel/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace evsel::metrics {

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::accuracy: return "accuracy";
    case Measure::map: return "map";
    case Measure::auc: return "auc";
  }
  return "unknown";
}

Measure measure_from_name(const std::string& name) {
  if (name == "accuracy") return Measure::accuracy;
  if (name == "map") return Measure::map;
  if (name == "auc") return Measure::auc;
  raise(ErrorCode::argument, "unknown measure '" + name + "'");
}

namespace {

void check_shapes(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels) {
  if (scores.count() != labels.count() || scores.classes() != labels.classes())
    raise(ErrorCode::dimension, "score matrix shape does not match labels");
  if (!scores.data.allFinite()) raise(ErrorCode::argument, "scores contain non-finite entries");
}

// Ranking order shared by AP and AUC: descending score, original index on ties.
std::vector<Index> ranked_order(const Eigen::VectorXd& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

void check_binary_vector(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size())
    raise(ErrorCode::dimension, "score and label vectors differ in length");
  for (Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 0.0 && labels(i) != 1.0)
      raise(ErrorCode::argument, "label vector entry " + std::to_string(i) + " is not 0 or 1");
}

}  // namespace

EvalResult accuracy(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels) {
  check_shapes(scores, labels);
  if (!labels.is_one_hot())
    raise(ErrorCode::argument, "accuracy requires one-hot labels (single-label task)");

  const Index k = labels.classes();
  Eigen::VectorXd correct = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
  for (Index n = 0; n < labels.count(); ++n) {
    Index truth = 0;
    for (Index c = 0; c < k; ++c)
      if (labels.data(n, c) == 1) truth = c;
    Index pred = 0;
    scores.data.row(n).maxCoeff(&pred);  // Eigen picks the lowest index on ties
    total(truth) += 1.0;
    if (pred == truth) correct(truth) += 1.0;
  }

  EvalResult out;
  out.measure = Measure::accuracy;
  out.per_class.resize(k);
  for (Index c = 0; c < k; ++c) out.per_class(c) = total(c) > 0.0 ? correct(c) / total(c) : 0.0;
  out.mean = out.per_class.mean();
  return out;
}

double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  check_binary_vector(scores, labels);
  const double positives = labels.sum();
  if (positives == 0.0) raise(ErrorCode::argument, "average precision needs at least one positive");

  const auto order = ranked_order(scores);
  double hits = 0.0;
  double ap = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels(order[rank]) == 1.0) {
      hits += 1.0;
      ap += hits / static_cast<double>(rank + 1);
    }
  }
  return ap / positives;
}

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  check_binary_vector(scores, labels);
  const double pos = labels.sum();
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0)
    raise(ErrorCode::argument, "AUC needs at least one positive and one negative");

  // Rank-sum (Mann-Whitney) with average ranks over tie groups.
  const auto order = ranked_order(scores);
  const std::size_t n = order.size();
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
    // descending ranks i+1 .. j+1 share the average rank
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t)
      if (labels(order[t]) == 1.0) pos_rank_sum += avg_rank;
    i = j + 1;
  }
  // Descending ranks: rank 1 is the best score, so correctly ordered pairs are
  // pos ranks BELOW neg ranks; convert via the complement.
  const double u = pos * neg + pos * (pos + 1.0) / 2.0 - pos_rank_sum;
  return u / (pos * neg);
}

namespace {

template <typename F>
EvalResult per_class_mean(Measure measure, const lssvm::ScoreMatrix& scores,
                          const LabelMatrix& labels, F&& f) {
  check_shapes(scores, labels);
  const Index k = labels.classes();
  EvalResult out;
  out.measure = measure;
  out.per_class.resize(k);
  for (Index c = 0; c < k; ++c)
    out.per_class(c) = f(Eigen::VectorXd(scores.data.col(c)), labels.class_column(c));
  out.mean = out.per_class.mean();
  return out;
}

}  // namespace

EvalResult mean_average_precision(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels) {
  return per_class_mean(Measure::map, scores, labels, average_precision);
}

EvalResult mean_auc(const lssvm::ScoreMatrix& scores, const LabelMatrix& labels) {
  return per_class_mean(Measure::auc, scores, labels, auc);
}

EvalResult evaluate(Measure measure, const lssvm::ScoreMatrix& scores, const LabelMatrix& labels) {
  switch (measure) {
    case Measure::accuracy: return accuracy(scores, labels);
    case Measure::map: return mean_average_precision(scores, labels);
    case Measure::auc: return mean_auc(scores, labels);
  }
  raise(ErrorCode::argument, "unknown measure");
}

}  // namespace evsel::metrics
