#include "doctest.h"

#include "evsel/metrics.hpp"
#include "evsel/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace evsel;
using namespace evsel::metrics;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("accuracy on perfect and inverted score matrices") {
  const auto labels = testutil::one_hot_labels(6, 2);
  lssvm::ScoreMatrix perfect{labels.data.cast<double>()};
  CHECK(accuracy(perfect, labels).mean == 1.0);

  lssvm::ScoreMatrix inverted{1.0 - labels.data.cast<double>().array()};
  CHECK(accuracy(inverted, labels).mean == 0.0);
}

TEST_CASE("accuracy matches a confusion-matrix oracle") {
  rng::Generator gen(5);
  const Index n = 60, k = 3;
  const auto labels = testutil::one_hot_labels(n, k);
  Eigen::MatrixXd scores(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < k; ++c) scores(i, c) = gen.normal();

  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(k, k);
  for (Index i = 0; i < n; ++i) {
    Index truth = 0, pred = 0;
    for (Index c = 0; c < k; ++c)
      if (labels.data(i, c) == 1) truth = c;
    double best = scores(i, 0);
    for (Index c = 1; c < k; ++c)
      if (scores(i, c) > best) {
        best = scores(i, c);
        pred = c;
      }
    confusion(truth, pred) += 1.0;
  }

  const auto result = accuracy(lssvm::ScoreMatrix{scores}, labels);
  for (Index c = 0; c < k; ++c)
    CHECK(result.per_class(c) ==
          doctest::Approx(confusion(c, c) / confusion.row(c).sum()).epsilon(1e-12));
  CHECK(result.mean == doctest::Approx(result.per_class.mean()).epsilon(1e-12));
}

TEST_CASE("accuracy ties break toward the lowest class index") {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(1, 2);
  y << 1, 0;
  lssvm::ScoreMatrix tied{Eigen::MatrixXd::Zero(1, 2)};
  CHECK(accuracy(tied, LabelMatrix{y}).per_class(0) == 1.0);
}

TEST_CASE("accuracy rejects non-one-hot labels") {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(2, 2);
  y << 1, 1, 0, 0;
  lssvm::ScoreMatrix s{Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(accuracy(s, LabelMatrix{y}), Error);
}

TEST_CASE("average_precision three-item hand case") {
  CHECK(average_precision(vec({0.9, 0.8, 0.7}), vec({1, 0, 1})) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("average_precision is 1 when positives rank first") {
  CHECK(average_precision(vec({0.9, 0.8, 0.2, 0.1}), vec({1, 1, 0, 0})) == 1.0);
}

TEST_CASE("average_precision rejects zero positives") {
  CHECK_THROWS_AS(average_precision(vec({0.5, 0.4}), vec({0, 0})), Error);
}

TEST_CASE("average_precision matches the brute-force oracle exactly") {
  rng::Generator gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 5 + static_cast<Index>(gen.below(40));
    Eigen::VectorXd scores(n), labels(n);
    bool has_pos = false;
    for (Index i = 0; i < n; ++i) {
      scores(i) = gen.uniform();
      labels(i) = gen.uniform() < 0.4 ? 1.0 : 0.0;
      has_pos = has_pos || labels(i) == 1.0;
    }
    if (!has_pos) labels(0) = 1.0;
    CHECK(average_precision(scores, labels) == oracles::ap_bruteforce(scores, labels));
  }
}

TEST_CASE("auc hand cases") {
  CHECK(auc(vec({0.9, 0.1}), vec({1, 0})) == 1.0);
  CHECK(auc(vec({0.5, 0.5, 0.5, 0.5}), vec({1, 0, 1, 0})) == 0.5);  // all ties
  CHECK_THROWS_AS(auc(vec({0.5, 0.4}), vec({1, 1})), Error);
}

TEST_CASE("auc matches the pair-counting oracle exactly") {
  rng::Generator gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 4 + static_cast<Index>(gen.below(40));
    Eigen::VectorXd scores(n), labels(n);
    for (Index i = 0; i < n; ++i) {
      // quantized scores force tie groups through the average-rank path
      scores(i) = std::floor(gen.uniform() * 8.0) / 8.0;
      labels(i) = gen.uniform() < 0.5 ? 1.0 : 0.0;
    }
    labels(0) = 1.0;
    labels(1) = 0.0;
    CHECK(auc(scores, labels) == oracles::auc_bruteforce(scores, labels));
  }
}

TEST_CASE("AP and AUC are invariant under monotone score transforms") {
  rng::Generator gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 12;
    Eigen::VectorXd scores(n), labels(n);
    for (Index i = 0; i < n; ++i) {
      scores(i) = gen.normal();
      labels(i) = gen.uniform() < 0.5 ? 1.0 : 0.0;
    }
    labels(0) = 1.0;
    labels(1) = 0.0;
    const Eigen::VectorXd transformed = 2.0 * scores.array() + 1.0;
    CHECK(average_precision(scores, labels) == average_precision(transformed, labels));
    CHECK(auc(scores, labels) == auc(transformed, labels));
  }
}

TEST_CASE("AUC of reversed scores is the complement on tie-free inputs") {
  const auto scores = vec({0.91, 0.72, 0.53, 0.34, 0.15, 0.06});
  const auto labels = vec({1, 0, 1, 1, 0, 0});
  const Eigen::VectorXd reversed = -scores;
  CHECK(auc(reversed, labels) == doctest::Approx(1.0 - auc(scores, labels)).epsilon(1e-15));
}

TEST_CASE("per-class means aggregate AP and AUC") {
  rng::Generator gen(17);
  const Index n = 30, k = 4;
  Eigen::MatrixXd scores(n, k);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < k; ++c) {
      scores(i, c) = gen.normal();
      y(i, c) = gen.uniform() < 0.4 ? 1 : 0;
    }
  for (Index c = 0; c < k; ++c) {
    y(0, c) = 1;
    y(1, c) = 0;
  }
  const LabelMatrix labels{y};
  const lssvm::ScoreMatrix sm{scores};

  const auto map_result = mean_average_precision(sm, labels);
  const auto auc_result = mean_auc(sm, labels);
  double ap_sum = 0.0, auc_sum = 0.0;
  for (Index c = 0; c < k; ++c) {
    ap_sum += average_precision(scores.col(c), labels.class_column(c));
    auc_sum += auc(scores.col(c), labels.class_column(c));
  }
  CHECK(map_result.mean == doctest::Approx(ap_sum / k).epsilon(1e-12));
  CHECK(auc_result.mean == doctest::Approx(auc_sum / k).epsilon(1e-12));
  CHECK(evaluate(Measure::map, sm, labels).mean == map_result.mean);
  CHECK(evaluate(Measure::auc, sm, labels).mean == auc_result.mean);
}

TEST_SUITE_END();
