#pragma once

#include <cstdint>
#include <string>

#include "evsel/types.hpp"

namespace evsel::spectral {

/// Cached spectral data of one feature bank: the eigendecomposition of the
/// D x D Gram matrix X X^T plus the per-class projected targets. Building it
/// is the single expensive step; every evidence/weight computation afterwards
/// is O(D) per class for any lambda.
struct EigenBasis {
  Eigen::MatrixXd u;    // D x D orthogonal, columns = eigenvectors of X X^T
  Eigen::VectorXd s;    // D eigenvalues, descending, >= 0
  Eigen::MatrixXd h;    // D x K, column k = U^T X y^(k)
  Eigen::VectorXd yty;  // K, entry k = y^(k)T y^(k) (= positive count)
  Index n = 0;          // samples
  Index d = 0;          // feature dims

  Index classes() const { return h.cols(); }
  Index nonzero_eigenvalues() const { return (s.array() > 0.0).count(); }
};

/// X X^T, symmetrized as (M + M^T)/2 so the result is exactly symmetric.
Eigen::MatrixXd gram(const FeatureBank& bank);

struct Eigh {
  Eigen::MatrixXd u;  // orthogonal
  Eigen::VectorXd s;  // descending; entries below 1e-12 * s_max clamped to 0
};

// Dense symmetric eigendecomposition with deterministic ordering: descending
// eigenvalues (stable among ties) and column signs canonicalized so the
// largest-magnitude entry of each eigenvector is positive. `context` names the
// offending bank in failure messages.
Eigh eigh(const Eigen::MatrixXd& m, const std::string& context = {});

EigenBasis build_basis(const FeatureBank& bank, const LabelMatrix& labels);

// Instrumentation: number of eigh() calls since process start / last reset.
// Lets tests assert decomposition-reuse economy (e.g. CV does one per fold).
std::uint64_t eigh_count();
void reset_eigh_count();

}  // namespace evsel::spectral
