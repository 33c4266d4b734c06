#include "doctest.h"

#include "evsel/spectral.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace evsel;
using spectral::build_basis;
using spectral::eigh;
using spectral::gram;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("gram of the 2x2 identity is the identity") {
  const auto g = gram(testutil::identity_bank());
  CHECK((g - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gram of {e1,e1,e2} is diag(2,1)") {
  const auto g = gram(testutil::three_column_bank());
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 0, 0, 1;
  CHECK((g - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gram matches a naive triple-loop accumulation") {
  const auto bank = testutil::random_bank(7, 8, 20);
  const auto g = gram(bank);
  CHECK(g.isApprox(g.transpose(), 0.0));  // exactly symmetric
  CHECK((g - oracles::gram_naive(bank.data)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("eigh of diag(2,1) is trivial") {
  Eigen::MatrixXd m(2, 2);
  m << 2, 0, 0, 1;
  const auto e = eigh(m);
  CHECK(e.s(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.s(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((e.u.cwiseAbs() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  // canonical sign: largest-magnitude entry positive
  CHECK(e.u(0, 0) > 0.0);
  CHECK(e.u(1, 1) > 0.0);
}

TEST_CASE("eigh clamps the negative eigenvalue of [[0,1],[1,0]]") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const auto e = eigh(m);
  CHECK(e.s(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.s(1) == 0.0);  // -1 clamped
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(e.u(0, 0)) - r) <= 1e-12);
  CHECK(std::abs(std::abs(e.u(1, 0)) - r) <= 1e-12);
  CHECK(e.u.col(0).dot(e.u.col(1)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstructs a random PSD matrix") {
  const auto bank = testutil::random_bank(11, 10, 30);
  const auto g = gram(bank);
  const auto e = eigh(g);
  const Eigen::MatrixXd rec = e.u * e.s.asDiagonal() * e.u.transpose();
  CHECK((rec - g).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("build_basis on the identity case") {
  const auto basis = build_basis(testutil::identity_bank(), testutil::identity_labels());
  CHECK(basis.s(0) == doctest::Approx(1.0));
  CHECK(basis.s(1) == doctest::Approx(1.0));
  CHECK(basis.h(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.h(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis.yty(0) == 1.0);
}

TEST_CASE("build_basis on {e1,e1,e2}") {
  const auto basis = build_basis(testutil::three_column_bank(), testutil::three_column_labels());
  CHECK(basis.s(0) == doctest::Approx(2.0));
  CHECK(basis.s(1) == doctest::Approx(1.0));
  CHECK(basis.h(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(basis.h(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis.yty(0) == 2.0);
}

TEST_CASE("build_basis h columns match a dense multiply") {
  const auto bank = testutil::random_bank(13, 12, 40);
  const auto labels = testutil::random_binary_labels(17, 40, 5);
  const auto basis = build_basis(bank, labels);
  for (Index k = 0; k < 5; ++k) {
    const Eigen::VectorXd expected =
        basis.u.transpose() * (bank.data * labels.class_column(k));
    CHECK((basis.h.col(k) - expected).cwiseAbs().maxCoeff() <= 1e-10);
  }
  // yty counts the positives
  for (Index k = 0; k < 5; ++k)
    CHECK(basis.yty(k) == static_cast<double>(labels.positives(k)));
}

TEST_CASE("build_basis rejects a sample-count mismatch") {
  CHECK_THROWS_AS(build_basis(testutil::identity_bank(), testutil::three_column_labels()),
                  Error);
}

TEST_CASE("basis invariants hold over 100 random seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index d = 4 + static_cast<Index>(seed % 7);
    const Index n = 3 + static_cast<Index>(seed % 11);
    const auto bank = testutil::random_bank(seed, d, n);
    const auto g = gram(bank);
    const auto e = eigh(g);

    // orthogonality
    const Eigen::MatrixXd utu = e.u.transpose() * e.u;
    CHECK((utu - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8);
    // reconstruction
    const Eigen::MatrixXd rec = e.u * e.s.asDiagonal() * e.u.transpose();
    CHECK((rec - g).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    // descending, nonnegative
    for (Index i = 1; i < d; ++i) CHECK(e.s(i - 1) >= e.s(i));
    CHECK(e.s.minCoeff() >= 0.0);
    // rank consistency
    CHECK((e.s.array() > 0.0).count() <= std::min(d, n));
  }
}

TEST_CASE("cached basis reproduces from-scratch solves for any lambda and class") {
  const auto bank = testutil::random_bank(23, 9, 25);
  const auto labels = testutil::random_binary_labels(29, 25, 2);
  const auto basis = build_basis(bank, labels);
  const auto fresh = build_basis(bank, labels);
  for (double lambda : {0.05, 3.0}) {
    for (Index k = 0; k < 2; ++k) {
      Eigen::VectorXd a(basis.d), b(basis.d);
      for (Index i = 0; i < basis.d; ++i) {
        a(i) = basis.h(i, k) / (basis.s(i) + lambda);
        b(i) = fresh.h(i, k) / (fresh.s(i) + lambda);
      }
      const Eigen::VectorXd wa = basis.u * a;
      const Eigen::VectorXd wb = fresh.u * b;
      CHECK((wa - wb).norm() <= 1e-10 * std::max(1.0, wa.norm()));
    }
  }
}

TEST_CASE("eigh instrumentation counts decompositions") {
  spectral::reset_eigh_count();
  const auto bank = testutil::random_bank(31, 5, 9);
  build_basis(bank, testutil::random_binary_labels(37, 9, 2));
  CHECK(spectral::eigh_count() == 1);
}

TEST_SUITE_END();
