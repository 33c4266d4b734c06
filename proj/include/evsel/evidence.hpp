#pragma once

#include <string>
#include <vector>

#include "evsel/spectral.hpp"
#include "evsel/types.hpp"

namespace evsel::evidence {

enum class Method { aitken, fixed_point_ab, em, lambda_plain };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct OptimOptions {
  double lambda_init = 1.0;
  double epsilon = 1e-5;  // absolute tolerance on lambda; a relative test epsilon*lambda also terminates
  int max_iters = 500;
  Method method = Method::aitken;
};

struct HyperparamState {
  double alpha = 0.0;   // prior precision
  double beta = 0.0;    // noise precision
  double lambda = 0.0;  // alpha / beta
  double gamma = 0.0;   // effective number of well-determined parameters
  double log_evidence = 0.0;
};

struct TraceRecord {
  int iteration = 0;
  double lambda = 0.0;
  double log_evidence = 0.0;
  double elapsed_ms = 0.0;  // cumulative wall clock within optimize_lambda
};

struct EvidenceResult {
  int class_index = 0;
  HyperparamState state;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRecord> trace;
  int fallback_count = 0;  // times Aitken fell back to lambda_2
};

/// Posterior summary scalars, all computed in the eigenbasis; the D x D
/// posterior precision matrix is never materialized.
struct PosteriorState {
  Eigen::VectorXd m_spectral;  // entry d = beta h_d / (alpha + beta s_d)
  double mtm = 0.0;            // m^T m
  double residual = 0.0;       // ||y - X^T m||^2
  double tr_ainv = 0.0;        // Tr(A^-1)
  double tr_ainv_gram = 0.0;   // Tr(A^-1 X X^T)
};

/// gamma(lambda) = sum_d s_d / (lambda + s_d).
double gamma_of(const Eigen::VectorXd& s, double lambda);

/// Noise precision maximizing the evidence at fixed lambda:
/// beta = N / (y^T y - sum_d h_d^2/(lambda + s_d)). Throws degenerate_fit when
/// the denominator is <= 1e-12 * y^T y.
double beta_of_lambda(const spectral::EigenBasis& basis, Index k, double lambda);

/// Log evidence L(alpha, beta), evaluated spectrally.
double log_evidence_ab(const spectral::EigenBasis& basis, Index k, double alpha, double beta);

/// One-dimensional log evidence F(lambda) = L(lambda*beta(lambda), beta(lambda)).
double log_evidence_1d(const spectral::EigenBasis& basis, Index k, double lambda);

PosteriorState posterior_state(const spectral::EigenBasis& basis, Index k, double alpha, double beta);

/// Classic fixed-point update: alpha' = gamma/m^T m, beta' = (N-gamma)/||y - X^T m||^2,
/// with m and gamma taken from the incoming state.
HyperparamState fixed_point_step_ab(const spectral::EigenBasis& basis, Index k,
                                    const HyperparamState& state);

/// EM update: alpha' = D/(m^T m + Tr(A^-1)), beta' = N/(residual + Tr(A^-1 X X^T)).
HyperparamState em_step(const spectral::EigenBasis& basis, Index k, const HyperparamState& state);

/// The 1-D fixed-point rule: lambda' = gamma / (beta * m^T m) with all three
/// recomputed at the given lambda.
double lambda_step(const spectral::EigenBasis& basis, Index k, double lambda);

struct AitkenResult {
  double value = 0.0;
  bool fallback = false;  // caller must use lambda_2 instead
};

/// Secant-line intersection with y = lambda. Fallback (not an error) when the
/// denominator vanishes or the extrapolated value is non-finite or <= 0.
AitkenResult aitken_extrapolate(double l0, double l1, double l2);

/// Maximizes F(lambda) for one class with the selected method. Non-convergence
/// within max_iters yields converged=false rather than an error. The final
/// state is normalized through lambda: alpha = lambda*beta(lambda),
/// beta = beta(lambda), gamma = gamma(lambda), log_evidence = F(lambda).
EvidenceResult optimize_lambda(const spectral::EigenBasis& basis, Index k,
                               const OptimOptions& opts);

struct SlopeResult {
  double slope = 0.0;
  bool warning = false;  // slope >= 1: the fixed-point existence condition is not certified
};

/// Asymptotic slope ||y||^2 ||X||_F^2 / (N ||X y||^2) of the update map.
SlopeResult asymptotic_slope(const FeatureBank& bank, const Eigen::VectorXd& y);

}  // namespace evsel::evidence
