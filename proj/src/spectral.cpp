#include "evsel/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <vector>

namespace evsel::spectral {

static std::atomic<std::uint64_t> g_eigh_count{0};

std::uint64_t eigh_count() { return g_eigh_count.load(); }
void reset_eigh_count() { g_eigh_count.store(0); }

Eigen::MatrixXd gram(const FeatureBank& bank) {
  Eigen::MatrixXd m = bank.data * bank.data.transpose();
  return 0.5 * (m + m.transpose());
}

Eigh eigh(const Eigen::MatrixXd& m, const std::string& context) {
  if (m.rows() != m.cols()) raise(ErrorCode::dimension, "eigh: matrix is not square");
  if (!m.allFinite()) raise(ErrorCode::argument, "eigh: matrix contains non-finite entries");

  g_eigh_count.fetch_add(1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    raise(ErrorCode::numerical,
          "eigendecomposition failed to converge" + (context.empty() ? "" : " for " + context));

  const Index d = m.rows();
  const Eigen::VectorXd& raw_s = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& raw_u = solver.eigenvectors();

  // Descending order, stable among ties so degenerate eigenspaces keep the
  // solver's column order.
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return raw_s(a) > raw_s(b); });

  Eigh out;
  out.u.resize(d, d);
  out.s.resize(d);
  for (Index j = 0; j < d; ++j) {
    out.s(j) = raw_s(order[static_cast<std::size_t>(j)]);
    out.u.col(j) = raw_u.col(order[static_cast<std::size_t>(j)]);
  }

  // Gram matrices are PSD; tiny negative eigenvalues are floating-point noise.
  const double clamp = 1e-12 * std::max(out.s(0), 0.0);
  for (Index j = 0; j < d; ++j)
    if (out.s(j) < clamp) out.s(j) = 0.0;

  // Canonical sign: largest-magnitude entry positive.
  for (Index j = 0; j < d; ++j) {
    Index imax = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, j) < 0.0) out.u.col(j) = -out.u.col(j);
  }
  return out;
}

EigenBasis build_basis(const FeatureBank& bank, const LabelMatrix& labels) {
  if (bank.count() != labels.count())
    raise(ErrorCode::dimension, "bank '" + bank.name + "' has " + std::to_string(bank.count()) +
                                    " samples but labels have " + std::to_string(labels.count()));

  Eigh e = eigh(gram(bank), "bank '" + bank.name + "'");

  EigenBasis basis;
  basis.u = std::move(e.u);
  basis.s = std::move(e.s);
  basis.n = bank.count();
  basis.d = bank.dim();

  const Index k = labels.classes();
  basis.h.resize(basis.d, k);
  basis.yty.resize(k);
  for (Index c = 0; c < k; ++c) {
    const Eigen::VectorXd y = labels.class_column(c);
    basis.h.col(c) = basis.u.transpose() * (bank.data * y);
    basis.yty(c) = y.squaredNorm();
  }
  return basis;
}

}  // namespace evsel::spectral
