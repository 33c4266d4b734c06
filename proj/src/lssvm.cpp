#include "evsel/lssvm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binio.hpp"
#include "evsel/log.hpp"
#include "evsel/parallel.hpp"

namespace evsel::lssvm {

Eigen::VectorXd solve_weights(const spectral::EigenBasis& basis, Index k, double lambda) {
  if (k < 0 || k >= basis.classes())
    raise(ErrorCode::argument, "class index " + std::to_string(k) + " out of range");
  if (!(lambda > 0.0)) raise(ErrorCode::argument, "lambda must be positive");
  Eigen::VectorXd coeffs(basis.d);
  for (Index d = 0; d < basis.d; ++d) coeffs(d) = basis.h(d, k) / (basis.s(d) + lambda);
  return basis.u * coeffs;
}

ClassifierModel train(const FeatureBank& bank, const LabelMatrix& labels,
                      const evidence::OptimOptions& opts, const TrainConfig& cfg) {
  labels.require_trainable();
  const spectral::EigenBasis basis = spectral::build_basis(bank, labels);
  const Index k = labels.classes();

  ClassifierModel model;
  model.d = bank.dim();
  model.k = k;
  model.bank_signature = bank.name;
  model.weights.resize(bank.dim(), k);
  model.lambdas.resize(k);
  model.per_class.resize(static_cast<std::size_t>(k));

  parallel_for(static_cast<std::size_t>(k), cfg.workers, [&](std::size_t c) {
    const Index ci = static_cast<Index>(c);
    evidence::EvidenceResult res = evidence::optimize_lambda(basis, ci, opts);
    if (!res.converged) {
      if (!cfg.accept_unconverged)
        raise(ErrorCode::unconverged, "class " + std::to_string(ci) + " did not converge within " +
                                          std::to_string(opts.max_iters) + " iterations");
      log::warn("class " + std::to_string(ci) + " unconverged after " +
                std::to_string(res.iterations) + " iterations; accepting lambda=" +
                std::to_string(res.state.lambda));
    }
    model.lambdas(ci) = res.state.lambda;
    model.weights.col(ci) = solve_weights(basis, ci, res.state.lambda);
    model.per_class[c] = std::move(res);
  });

  model.overall_evidence = overall_evidence(model.per_class);
  return model;
}

double overall_evidence(const std::vector<evidence::EvidenceResult>& per_class) {
  if (per_class.empty()) raise(ErrorCode::argument, "no per-class results to sum");
  std::vector<const evidence::EvidenceResult*> ordered;
  ordered.reserve(per_class.size());
  for (const auto& r : per_class) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->class_index < b->class_index; });
  double total = 0.0;
  for (const auto* r : ordered) total += r->state.log_evidence;
  return total;
}

ScoreMatrix predict_scores(const ClassifierModel& model, const FeatureBank& bank) {
  if (bank.dim() != model.d)
    raise(ErrorCode::dimension, "bank '" + bank.name + "' has " + std::to_string(bank.dim()) +
                                    " dims but model expects " + std::to_string(model.d));
  return ScoreMatrix{bank.data.transpose() * model.weights};
}

ScoreMatrix average_scores(const std::vector<ScoreMatrix>& scores) {
  if (scores.empty()) raise(ErrorCode::argument, "no score matrices to average");
  Eigen::MatrixXd acc = scores.front().data;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].data.rows() != acc.rows() || scores[i].data.cols() != acc.cols())
      raise(ErrorCode::dimension, "score matrix " + std::to_string(i) + " shape mismatch");
    acc += scores[i].data;
  }
  return ScoreMatrix{acc / static_cast<double>(scores.size())};
}

namespace {
constexpr std::uint32_t kModelVersion = 1;
}

void save_model(const ClassifierModel& model, const std::string& path) {
  binio::Writer w(path);
  w.magic("BMDL");
  w.u32(kModelVersion);
  w.u64(static_cast<std::uint64_t>(model.d));
  w.u64(static_cast<std::uint64_t>(model.k));
  for (Index c = 0; c < model.k; ++c) w.f64(model.lambdas(c));
  for (Index c = 0; c < model.k; ++c)
    for (Index d = 0; d < model.d; ++d) w.f64(model.weights(d, c));
  w.f64(model.overall_evidence);
  w.str(model.bank_signature);
  w.close();
}

ClassifierModel load_model(const std::string& path) {
  binio::Reader r(path);
  r.magic("BMDL");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    raise(ErrorCode::format, "'" + path + "': unsupported BMDL version " + std::to_string(version));
  ClassifierModel model;
  model.d = static_cast<Index>(r.u64());
  model.k = static_cast<Index>(r.u64());
  if (model.d < 1 || model.k < 1) raise(ErrorCode::format, "'" + path + "': empty model");
  model.lambdas.resize(model.k);
  for (Index c = 0; c < model.k; ++c) model.lambdas(c) = r.f64();
  model.weights.resize(model.d, model.k);
  for (Index c = 0; c < model.k; ++c)
    for (Index d = 0; d < model.d; ++d) model.weights(d, c) = r.f64();
  model.overall_evidence = r.f64();
  model.bank_signature = r.str();
  r.expect_end();
  if (!model.weights.allFinite() || !model.lambdas.allFinite())
    raise(ErrorCode::format, "'" + path + "': non-finite model parameters");
  return model;
}

}  // namespace evsel::lssvm
