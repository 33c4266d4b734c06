#include "evsel/evidence.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace evsel::evidence {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_class(const spectral::EigenBasis& basis, Index k) {
  if (k < 0 || k >= basis.classes())
    raise(ErrorCode::argument, "class index " + std::to_string(k) + " out of range");
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    raise(ErrorCode::argument, std::string(name) + " must be positive and finite");
}

// y^T y - sum_d h_d^2 / (lambda + s_d); the fit term under the optimal noise precision.
double fit_denominator(const spectral::EigenBasis& basis, Index k, double lambda) {
  const auto& s = basis.s;
  const auto& h = basis.h;
  double acc = 0.0;
  for (Index d = 0; d < basis.d; ++d) acc += h(d, k) * h(d, k) / (lambda + s(d));
  return basis.yty(k) - acc;
}

double fit_denominator_checked(const spectral::EigenBasis& basis, Index k, double lambda) {
  const double denom = fit_denominator(basis, k, lambda);
  if (denom <= 1e-12 * basis.yty(k))
    raise(ErrorCode::degenerate_fit,
          "class " + std::to_string(k) + ": evidence undefined at lambda=" +
              std::to_string(lambda) + " (targets perfectly interpolated or degenerate)");
  return denom;
}

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::aitken: return "aitken";
    case Method::fixed_point_ab: return "fixed_point_ab";
    case Method::em: return "em";
    case Method::lambda_plain: return "lambda_plain";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "aitken") return Method::aitken;
  if (name == "fixed_point_ab") return Method::fixed_point_ab;
  if (name == "em") return Method::em;
  if (name == "lambda_plain") return Method::lambda_plain;
  raise(ErrorCode::argument, "unknown method '" + name + "'");
}

double gamma_of(const Eigen::VectorXd& s, double lambda) {
  check_positive(lambda, "lambda");
  double acc = 0.0;
  for (Index d = 0; d < s.size(); ++d) acc += s(d) / (lambda + s(d));
  return acc;
}

double beta_of_lambda(const spectral::EigenBasis& basis, Index k, double lambda) {
  check_class(basis, k);
  check_positive(lambda, "lambda");
  return static_cast<double>(basis.n) / fit_denominator_checked(basis, k, lambda);
}

double log_evidence_ab(const spectral::EigenBasis& basis, Index k, double alpha, double beta) {
  check_class(basis, k);
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  const auto& s = basis.s;
  const auto& h = basis.h;
  const double n = static_cast<double>(basis.n);
  const double d = static_cast<double>(basis.d);

  double log_det = 0.0;
  double quad = 0.0;
  for (Index i = 0; i < basis.d; ++i) {
    const double a = alpha + beta * s(i);
    log_det += std::log(a);
    quad += h(i, k) * h(i, k) / a;
  }
  return 0.5 * d * std::log(alpha) + 0.5 * n * std::log(beta) - 0.5 * log_det -
         0.5 * beta * basis.yty(k) + 0.5 * beta * beta * quad - 0.5 * n * kLog2Pi;
}

double log_evidence_1d(const spectral::EigenBasis& basis, Index k, double lambda) {
  check_class(basis, k);
  check_positive(lambda, "lambda");
  const double denom = fit_denominator_checked(basis, k, lambda);
  const auto& s = basis.s;
  const double n = static_cast<double>(basis.n);

  double log_shrink = 0.0;
  for (Index d = 0; d < basis.d; ++d) log_shrink += std::log(lambda / (lambda + s(d)));
  return 0.5 * log_shrink + 0.5 * n * std::log(n) - 0.5 * n - 0.5 * n * kLog2Pi -
         0.5 * n * std::log(denom);
}

PosteriorState posterior_state(const spectral::EigenBasis& basis, Index k, double alpha,
                               double beta) {
  check_class(basis, k);
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  const auto& s = basis.s;
  const auto& h = basis.h;

  PosteriorState post;
  post.m_spectral.resize(basis.d);
  double cross = 0.0;  // h^T m
  double curve = 0.0;  // sum_d s_d m_d^2
  for (Index d = 0; d < basis.d; ++d) {
    const double a = alpha + beta * s(d);
    const double m = beta * h(d, k) / a;
    post.m_spectral(d) = m;
    post.mtm += m * m;
    cross += h(d, k) * m;
    curve += s(d) * m * m;
    post.tr_ainv += 1.0 / a;
    post.tr_ainv_gram += s(d) / a;
  }
  post.residual = basis.yty(k) - 2.0 * cross + curve;
  if (post.residual < 0.0) post.residual = 0.0;  // exact zero crossed by rounding
  return post;
}

HyperparamState fixed_point_step_ab(const spectral::EigenBasis& basis, Index k,
                                    const HyperparamState& state) {
  check_class(basis, k);
  check_positive(state.alpha, "alpha");
  check_positive(state.beta, "beta");
  const PosteriorState post = posterior_state(basis, k, state.alpha, state.beta);
  const double gamma = gamma_of(basis.s, state.alpha / state.beta);
  if (post.mtm <= 0.0)
    raise(ErrorCode::degenerate_class, "class " + std::to_string(k) + ": posterior mean is zero");
  if (post.residual <= 0.0)
    raise(ErrorCode::degenerate_fit,
          "class " + std::to_string(k) + ": zero residual, targets perfectly interpolated");

  HyperparamState next;
  next.alpha = gamma / post.mtm;
  next.beta = (static_cast<double>(basis.n) - gamma) / post.residual;
  next.lambda = next.alpha / next.beta;
  next.gamma = gamma_of(basis.s, next.lambda);
  next.log_evidence = log_evidence_ab(basis, k, next.alpha, next.beta);
  return next;
}

HyperparamState em_step(const spectral::EigenBasis& basis, Index k, const HyperparamState& state) {
  check_class(basis, k);
  check_positive(state.alpha, "alpha");
  check_positive(state.beta, "beta");
  const PosteriorState post = posterior_state(basis, k, state.alpha, state.beta);
  if (post.mtm <= 0.0)
    raise(ErrorCode::degenerate_class, "class " + std::to_string(k) + ": posterior mean is zero");
  if (post.residual + post.tr_ainv_gram <= 0.0)
    raise(ErrorCode::degenerate_fit, "class " + std::to_string(k) + ": zero EM residual term");

  HyperparamState next;
  next.alpha = static_cast<double>(basis.d) / (post.mtm + post.tr_ainv);
  next.beta = static_cast<double>(basis.n) / (post.residual + post.tr_ainv_gram);
  next.lambda = next.alpha / next.beta;
  next.gamma = gamma_of(basis.s, next.lambda);
  next.log_evidence = log_evidence_ab(basis, k, next.alpha, next.beta);
  return next;
}

double lambda_step(const spectral::EigenBasis& basis, Index k, double lambda) {
  check_class(basis, k);
  check_positive(lambda, "lambda");
  const auto& s = basis.s;
  const auto& h = basis.h;

  const double gamma = gamma_of(s, lambda);
  const double beta = static_cast<double>(basis.n) / fit_denominator_checked(basis, k, lambda);
  double mtm = 0.0;
  for (Index d = 0; d < basis.d; ++d) {
    const double a = lambda + s(d);
    mtm += h(d, k) * h(d, k) / (a * a);
  }
  if (mtm <= 0.0)
    raise(ErrorCode::degenerate_class, "class " + std::to_string(k) + ": X y is zero");
  return gamma / (beta * mtm);
}

AitkenResult aitken_extrapolate(double l0, double l1, double l2) {
  const double d1 = l1 - l0;
  const double d2 = l2 - l1;
  const double denom = d2 - d1;
  if (denom == 0.0) return {0.0, true};  // secant parallel to y = lambda
  const double value = l0 - d1 * d1 / denom;
  if (!std::isfinite(value) || value <= 0.0) return {0.0, true};
  return {value, false};
}

EvidenceResult optimize_lambda(const spectral::EigenBasis& basis, Index k,
                               const OptimOptions& opts) {
  check_class(basis, k);
  check_positive(opts.lambda_init, "lambda_init");
  check_positive(opts.epsilon, "epsilon");
  if (opts.max_iters < 1) raise(ErrorCode::argument, "max_iters must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  EvidenceResult result;
  result.class_index = static_cast<int>(k);

  double lambda = opts.lambda_init;
  result.trace.push_back({0, lambda, log_evidence_1d(basis, k, lambda), ms_since(t0)});

  // For the (alpha, beta) methods the start state is beta-consistent at
  // lambda_init, so all four methods begin from the same point on F.
  HyperparamState state;
  if (opts.method == Method::fixed_point_ab || opts.method == Method::em) {
    state.beta = beta_of_lambda(basis, k, lambda);
    state.alpha = lambda * state.beta;
    state.lambda = lambda;
  }

  const auto converged = [&](double current, double previous) {
    const double delta = std::abs(current - previous);
    return delta < opts.epsilon || delta < opts.epsilon * previous;
  };

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const double lambda0 = lambda;
    switch (opts.method) {
      case Method::aitken: {
        const double l1 = lambda_step(basis, k, lambda0);
        const double l2 = lambda_step(basis, k, l1);
        const AitkenResult ext = aitken_extrapolate(lambda0, l1, l2);
        if (ext.fallback) {
          ++result.fallback_count;
          lambda = l2;
        } else {
          lambda = ext.value;
        }
        break;
      }
      case Method::lambda_plain:
        lambda = lambda_step(basis, k, lambda0);
        break;
      case Method::fixed_point_ab:
        state = fixed_point_step_ab(basis, k, state);
        lambda = state.lambda;
        break;
      case Method::em:
        state = em_step(basis, k, state);
        lambda = state.lambda;
        break;
    }
    result.iterations = iter;
    result.trace.push_back({iter, lambda, log_evidence_1d(basis, k, lambda), ms_since(t0)});
    if (converged(lambda, lambda0)) {
      result.converged = true;
      break;
    }
  }

  result.state.lambda = lambda;
  result.state.beta = beta_of_lambda(basis, k, lambda);
  result.state.alpha = lambda * result.state.beta;
  result.state.gamma = gamma_of(basis.s, lambda);
  result.state.log_evidence = log_evidence_1d(basis, k, lambda);
  return result;
}

SlopeResult asymptotic_slope(const FeatureBank& bank, const Eigen::VectorXd& y) {
  if (y.size() != bank.count())
    raise(ErrorCode::dimension, "label vector length does not match bank sample count");
  const double yty = y.squaredNorm();
  if (yty == 0.0) raise(ErrorCode::argument, "label vector is all zero");
  const double xy_norm2 = (bank.data * y).squaredNorm();
  if (xy_norm2 == 0.0)
    raise(ErrorCode::degenerate_class, "X y is zero: class carries no feature signal");

  SlopeResult out;
  out.slope = yty * bank.data.squaredNorm() / (static_cast<double>(bank.count()) * xy_norm2);
  out.warning = out.slope >= 1.0;
  return out;
}

}  // namespace evsel::evidence
