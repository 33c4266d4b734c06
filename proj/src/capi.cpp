#include "evsel.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "evsel/dataio.hpp"
#include "evsel/evidence.hpp"
#include "evsel/lssvm.hpp"
#include "evsel/metrics.hpp"
#include "evsel/selection.hpp"
#include "evsel/spectral.hpp"
#include "evsel/types.hpp"

using evsel::Error;
using evsel::ErrorCode;
using evsel::Index;

struct evsel_bank {
  evsel::FeatureBank bank;
};
struct evsel_labels {
  evsel::LabelMatrix labels;
};
struct evsel_basis {
  evsel::spectral::EigenBasis basis;
};
struct evsel_result {
  evsel::evidence::EvidenceResult result;
};
struct evsel_model {
  evsel::lssvm::ClassifierModel model;
};
struct evsel_candidates {
  evsel::selection::CandidateSet set;
};
struct evsel_manifest {
  evsel::dataio::DatasetManifest manifest;
};

namespace {

thread_local std::string t_last_error;

evsel_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::argument: return EVSEL_ERR_ARGUMENT;
    case ErrorCode::dimension: return EVSEL_ERR_DIMENSION;
    case ErrorCode::io: return EVSEL_ERR_IO;
    case ErrorCode::format: return EVSEL_ERR_FORMAT;
    case ErrorCode::degenerate_fit:
    case ErrorCode::degenerate_class: return EVSEL_ERR_DEGENERATE;
    case ErrorCode::numerical: return EVSEL_ERR_NUMERICAL;
    case ErrorCode::unconverged: return EVSEL_ERR_UNCONVERGED;
  }
  return EVSEL_ERR_UNKNOWN;
}

template <typename F>
evsel_status guard(F&& f) {
  try {
    f();
    t_last_error.clear();
    return EVSEL_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return EVSEL_ERR_UNKNOWN;
  } catch (...) {
    t_last_error = "unknown failure";
    return EVSEL_ERR_UNKNOWN;
  }
}

evsel_status fail_argument(const char* msg) {
  t_last_error = msg;
  return EVSEL_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

evsel::evidence::OptimOptions to_optim(const evsel_optim_options* opts) {
  evsel::evidence::OptimOptions out;
  if (!opts) return out;
  out.lambda_init = opts->lambda_init;
  out.epsilon = opts->epsilon;
  out.max_iters = opts->max_iters;
  switch (opts->method) {
    case EVSEL_METHOD_AITKEN: out.method = evsel::evidence::Method::aitken; break;
    case EVSEL_METHOD_LAMBDA_PLAIN: out.method = evsel::evidence::Method::lambda_plain; break;
    case EVSEL_METHOD_FIXED_POINT_AB: out.method = evsel::evidence::Method::fixed_point_ab; break;
    case EVSEL_METHOD_EM: out.method = evsel::evidence::Method::em; break;
    default: evsel::raise(ErrorCode::argument, "unknown optimization method id");
  }
  return out;
}

evsel::lssvm::TrainConfig to_train_config(const evsel_optim_options* opts) {
  evsel::lssvm::TrainConfig cfg;
  if (!opts) return cfg;
  cfg.accept_unconverged = opts->accept_unconverged != 0;
  cfg.workers = opts->workers;
  return cfg;
}

evsel::metrics::Measure to_measure(int32_t measure) {
  switch (measure) {
    case EVSEL_MEASURE_ACCURACY: return evsel::metrics::Measure::accuracy;
    case EVSEL_MEASURE_MAP: return evsel::metrics::Measure::map;
    case EVSEL_MEASURE_AUC: return evsel::metrics::Measure::auc;
  }
  evsel::raise(ErrorCode::argument, "unknown measure id");
}

evsel::TaskMode to_mode(int32_t mode) {
  switch (mode) {
    case EVSEL_MODE_SINGLE_LABEL: return evsel::TaskMode::single_label;
    case EVSEL_MODE_MULTI_LABEL: return evsel::TaskMode::multi_label;
  }
  evsel::raise(ErrorCode::argument, "unknown task mode id");
}

evsel::lssvm::ScoreMatrix to_scores(const double* scores, size_t n, size_t k) {
  if (!scores) evsel::raise(ErrorCode::argument, "scores buffer is null");
  Eigen::MatrixXd data(static_cast<Index>(n), static_cast<Index>(k));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j)
      data(static_cast<Index>(i), static_cast<Index>(j)) = scores[i * k + j];
  return evsel::lssvm::ScoreMatrix{std::move(data)};
}

std::vector<Index> to_indices(const size_t* indices, size_t count) {
  if (!indices || count == 0) evsel::raise(ErrorCode::argument, "empty index selection");
  std::vector<Index> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = static_cast<Index>(indices[i]);
  return out;
}

evsel::dataio::SynthSpec to_synth(const evsel_synth_spec* spec) {
  if (!spec) evsel::raise(ErrorCode::argument, "synth spec is null");
  evsel::dataio::SynthSpec out;
  out.n = static_cast<Index>(spec->n);
  out.d = static_cast<Index>(spec->d);
  out.k = static_cast<Index>(spec->k);
  out.noise_level = spec->noise_level;
  out.informative_fraction = spec->informative_fraction;
  out.seed = spec->seed;
  out.nonneg_l2 = spec->nonneg_l2 != 0;
  return out;
}

evsel_status metric_common(int32_t measure, const double* scores, size_t n, size_t k,
                           const evsel_labels* labels, double* per_class, double* mean) {
  return guard([&] {
    if (!labels) evsel::raise(ErrorCode::argument, "labels handle is null");
    const auto result =
        evsel::metrics::evaluate(to_measure(measure), to_scores(scores, n, k), labels->labels);
    if (per_class)
      for (Index c = 0; c < result.per_class.size(); ++c) per_class[c] = result.per_class(c);
    if (mean) *mean = result.mean;
  });
}

}  // namespace

extern "C" {

const char* evsel_version(void) { return "0.1.0"; }

const char* evsel_last_error(void) { return t_last_error.c_str(); }

void evsel_free(void* p) { std::free(p); }
void evsel_string_free(char* s) { std::free(s); }

void evsel_optim_options_init(evsel_optim_options* opts) {
  if (!opts) return;
  opts->lambda_init = 1.0;
  opts->epsilon = 1e-5;
  opts->max_iters = 500;
  opts->method = EVSEL_METHOD_AITKEN;
  opts->accept_unconverged = 0;
  opts->workers = 1;
}

/* ---- banks ---- */

evsel_status evsel_bank_create(const char* name, size_t d, size_t n, const double* row_major,
                               evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!name || !row_major) evsel::raise(ErrorCode::argument, "name/data must not be null");
    Eigen::MatrixXd data(static_cast<Index>(d), static_cast<Index>(n));
    for (size_t r = 0; r < d; ++r)
      for (size_t c = 0; c < n; ++c)
        data(static_cast<Index>(r), static_cast<Index>(c)) = row_major[r * n + c];
    *out = new evsel_bank{evsel::FeatureBank::create(name, std::move(data))};
  });
}

evsel_status evsel_bank_read(const char* path, evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] { *out = new evsel_bank{evsel::dataio::read_bank(path)}; });
}

evsel_status evsel_bank_read_csv(const char* path, evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] { *out = new evsel_bank{evsel::dataio::read_bank_csv(path)}; });
}

evsel_status evsel_bank_write(const evsel_bank* bank, const char* path) {
  return guard([&] {
    if (!bank) evsel::raise(ErrorCode::argument, "bank handle is null");
    evsel::dataio::write_bank(bank->bank, path);
  });
}

size_t evsel_bank_dim(const evsel_bank* bank) {
  return bank ? static_cast<size_t>(bank->bank.dim()) : 0;
}
size_t evsel_bank_samples(const evsel_bank* bank) {
  return bank ? static_cast<size_t>(bank->bank.count()) : 0;
}
const char* evsel_bank_name(const evsel_bank* bank) { return bank ? bank->bank.name.c_str() : ""; }

evsel_status evsel_bank_data(const evsel_bank* bank, double* row_major_out) {
  return guard([&] {
    if (!bank || !row_major_out) evsel::raise(ErrorCode::argument, "null argument");
    const auto& m = bank->bank.data;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c)
        row_major_out[static_cast<size_t>(r) * static_cast<size_t>(m.cols()) +
                      static_cast<size_t>(c)] = m(r, c);
  });
}

evsel_status evsel_bank_l2_normalize(const evsel_bank* bank, evsel_bank** out,
                                     size_t* negative_entries) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!bank) evsel::raise(ErrorCode::argument, "bank handle is null");
    auto normalized = evsel::dataio::l2_normalize_columns(bank->bank);
    if (negative_entries) *negative_entries = normalized.negative_entries;
    *out = new evsel_bank{std::move(normalized.bank)};
  });
}

evsel_status evsel_bank_select(const evsel_bank* bank, const size_t* indices, size_t count,
                               evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!bank) evsel::raise(ErrorCode::argument, "bank handle is null");
    *out = new evsel_bank{evsel::dataio::select_columns(bank->bank, to_indices(indices, count))};
  });
}

evsel_status evsel_bank_concat(const evsel_bank* const* banks, size_t count, evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!banks || count == 0) evsel::raise(ErrorCode::argument, "no banks to concatenate");
    Index total_d = 0;
    const Index n = banks[0] ? banks[0]->bank.count() : 0;
    std::string joined;
    for (size_t i = 0; i < count; ++i) {
      if (!banks[i]) evsel::raise(ErrorCode::argument, "bank handle is null");
      if (banks[i]->bank.count() != n)
        evsel::raise(ErrorCode::dimension, "banks disagree on sample count");
      total_d += banks[i]->bank.dim();
      if (!joined.empty()) joined += '+';
      joined += banks[i]->bank.name;
    }
    Eigen::MatrixXd data(total_d, n);
    Index row = 0;
    for (size_t i = 0; i < count; ++i) {
      data.middleRows(row, banks[i]->bank.dim()) = banks[i]->bank.data;
      row += banks[i]->bank.dim();
    }
    *out = new evsel_bank{evsel::FeatureBank{std::move(joined), std::move(data)}};
  });
}

void evsel_bank_free(evsel_bank* bank) { delete bank; }

/* ---- labels ---- */

evsel_status evsel_labels_create(size_t n, size_t k, const uint8_t* row_major,
                                 evsel_labels** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!row_major) evsel::raise(ErrorCode::argument, "data must not be null");
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data(static_cast<Index>(n),
                                                                     static_cast<Index>(k));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < k; ++j)
        data(static_cast<Index>(i), static_cast<Index>(j)) = row_major[i * k + j];
    *out = new evsel_labels{evsel::LabelMatrix::create(std::move(data))};
  });
}

evsel_status evsel_labels_read(const char* path, evsel_labels** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] { *out = new evsel_labels{evsel::dataio::read_labels(path)}; });
}

evsel_status evsel_labels_write(const evsel_labels* labels, const char* path) {
  return guard([&] {
    if (!labels) evsel::raise(ErrorCode::argument, "labels handle is null");
    evsel::dataio::write_labels(labels->labels, path);
  });
}

size_t evsel_labels_samples(const evsel_labels* labels) {
  return labels ? static_cast<size_t>(labels->labels.count()) : 0;
}
size_t evsel_labels_classes(const evsel_labels* labels) {
  return labels ? static_cast<size_t>(labels->labels.classes()) : 0;
}

evsel_status evsel_labels_data(const evsel_labels* labels, uint8_t* row_major_out) {
  return guard([&] {
    if (!labels || !row_major_out) evsel::raise(ErrorCode::argument, "null argument");
    const auto& m = labels->labels.data;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c)
        row_major_out[static_cast<size_t>(r) * static_cast<size_t>(m.cols()) +
                      static_cast<size_t>(c)] = m(r, c);
  });
}

evsel_status evsel_labels_select(const evsel_labels* labels, const size_t* indices, size_t count,
                                 evsel_labels** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!labels) evsel::raise(ErrorCode::argument, "labels handle is null");
    *out = new evsel_labels{evsel::dataio::select_rows(labels->labels, to_indices(indices, count))};
  });
}

void evsel_labels_free(evsel_labels* labels) { delete labels; }

/* ---- synthetic data ---- */

void evsel_synth_spec_init(evsel_synth_spec* spec) {
  if (!spec) return;
  spec->n = 0;
  spec->d = 0;
  spec->k = 0;
  spec->noise_level = 0.0;
  spec->informative_fraction = 0.5;
  spec->seed = 0;
  spec->nonneg_l2 = 0;
}

evsel_status evsel_synth_generate(const evsel_synth_spec* spec, evsel_bank** bank,
                                  evsel_labels** labels, size_t** test_indices,
                                  size_t* test_count) {
  if (!bank || !labels) return fail_argument("output pointer is null");
  return guard([&] {
    auto data = evsel::dataio::generate_synthetic(to_synth(spec));
    if (test_indices) {
      *test_indices = static_cast<size_t*>(
          std::malloc(sizeof(size_t) * std::max<size_t>(1, data.test_indices.size())));
      for (size_t i = 0; i < data.test_indices.size(); ++i)
        (*test_indices)[i] = static_cast<size_t>(data.test_indices[i]);
    }
    if (test_count) *test_count = data.test_indices.size();
    *bank = new evsel_bank{std::move(data.bank)};
    *labels = new evsel_labels{std::move(data.labels)};
  });
}

evsel_status evsel_synth_generate_bank(const evsel_synth_spec* spec, const evsel_labels* labels,
                                       const int32_t* class_groups, evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!labels) evsel::raise(ErrorCode::argument, "labels handle is null");
    std::vector<int> groups;
    if (class_groups) groups.assign(class_groups, class_groups + labels->labels.classes());
    *out = new evsel_bank{
        evsel::dataio::generate_synthetic_bank(to_synth(spec), labels->labels, groups)};
  });
}

/* ---- basis + optimization ---- */

evsel_status evsel_basis_build(const evsel_bank* bank, const evsel_labels* labels,
                               evsel_basis** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!bank || !labels) evsel::raise(ErrorCode::argument, "null argument");
    *out = new evsel_basis{evsel::spectral::build_basis(bank->bank, labels->labels)};
  });
}

size_t evsel_basis_classes(const evsel_basis* basis) {
  return basis ? static_cast<size_t>(basis->basis.classes()) : 0;
}

void evsel_basis_free(evsel_basis* basis) { delete basis; }

evsel_status evsel_optimize_lambda(const evsel_basis* basis, size_t class_index,
                                   const evsel_optim_options* opts, evsel_result** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!basis) evsel::raise(ErrorCode::argument, "basis handle is null");
    *out = new evsel_result{evsel::evidence::optimize_lambda(
        basis->basis, static_cast<Index>(class_index), to_optim(opts))};
  });
}

evsel_status evsel_result_state(const evsel_result* result, evsel_hyperparams* out) {
  return guard([&] {
    if (!result || !out) evsel::raise(ErrorCode::argument, "null argument");
    out->alpha = result->result.state.alpha;
    out->beta = result->result.state.beta;
    out->lambda = result->result.state.lambda;
    out->gamma = result->result.state.gamma;
    out->log_evidence = result->result.state.log_evidence;
  });
}

int32_t evsel_result_converged(const evsel_result* result) {
  return result && result->result.converged ? 1 : 0;
}
int32_t evsel_result_iterations(const evsel_result* result) {
  return result ? result->result.iterations : 0;
}
int32_t evsel_result_fallbacks(const evsel_result* result) {
  return result ? result->result.fallback_count : 0;
}
size_t evsel_result_trace_size(const evsel_result* result) {
  return result ? result->result.trace.size() : 0;
}

evsel_status evsel_result_trace(const evsel_result* result, double* lambdas,
                                double* log_evidences, double* elapsed_ms) {
  return guard([&] {
    if (!result) evsel::raise(ErrorCode::argument, "result handle is null");
    const auto& trace = result->result.trace;
    for (size_t i = 0; i < trace.size(); ++i) {
      if (lambdas) lambdas[i] = trace[i].lambda;
      if (log_evidences) log_evidences[i] = trace[i].log_evidence;
      if (elapsed_ms) elapsed_ms[i] = trace[i].elapsed_ms;
    }
  });
}

void evsel_result_free(evsel_result* result) { delete result; }

evsel_status evsel_log_evidence_1d(const evsel_basis* basis, size_t class_index, double lambda,
                                   double* out) {
  return guard([&] {
    if (!basis || !out) evsel::raise(ErrorCode::argument, "null argument");
    *out = evsel::evidence::log_evidence_1d(basis->basis, static_cast<Index>(class_index), lambda);
  });
}

evsel_status evsel_log_evidence_ab(const evsel_basis* basis, size_t class_index, double alpha,
                                   double beta, double* out) {
  return guard([&] {
    if (!basis || !out) evsel::raise(ErrorCode::argument, "null argument");
    *out = evsel::evidence::log_evidence_ab(basis->basis, static_cast<Index>(class_index), alpha,
                                            beta);
  });
}

evsel_status evsel_asymptotic_slope(const evsel_bank* bank, const uint8_t* y, size_t n,
                                    double* slope, int32_t* warning) {
  return guard([&] {
    if (!bank || !y || !slope) evsel::raise(ErrorCode::argument, "null argument");
    Eigen::VectorXd labels(static_cast<Index>(n));
    for (size_t i = 0; i < n; ++i) {
      if (y[i] > 1) evsel::raise(ErrorCode::argument, "label entries must be 0 or 1");
      labels(static_cast<Index>(i)) = y[i];
    }
    const auto result = evsel::evidence::asymptotic_slope(bank->bank, labels);
    *slope = result.slope;
    if (warning) *warning = result.warning ? 1 : 0;
  });
}

/* ---- model ---- */

evsel_status evsel_train(const evsel_bank* bank, const evsel_labels* labels,
                         const evsel_optim_options* opts, evsel_model** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!bank || !labels) evsel::raise(ErrorCode::argument, "null argument");
    *out = new evsel_model{
        evsel::lssvm::train(bank->bank, labels->labels, to_optim(opts), to_train_config(opts))};
  });
}

evsel_status evsel_model_save(const evsel_model* model, const char* path) {
  return guard([&] {
    if (!model) evsel::raise(ErrorCode::argument, "model handle is null");
    evsel::lssvm::save_model(model->model, path);
  });
}

evsel_status evsel_model_load(const char* path, evsel_model** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] { *out = new evsel_model{evsel::lssvm::load_model(path)}; });
}

size_t evsel_model_dim(const evsel_model* model) {
  return model ? static_cast<size_t>(model->model.d) : 0;
}
size_t evsel_model_classes(const evsel_model* model) {
  return model ? static_cast<size_t>(model->model.k) : 0;
}
double evsel_model_evidence(const evsel_model* model) {
  return model ? model->model.overall_evidence : 0.0;
}
const char* evsel_model_signature(const evsel_model* model) {
  return model ? model->model.bank_signature.c_str() : "";
}

evsel_status evsel_model_lambdas(const evsel_model* model, double* out) {
  return guard([&] {
    if (!model || !out) evsel::raise(ErrorCode::argument, "null argument");
    for (Index c = 0; c < model->model.k; ++c) out[c] = model->model.lambdas(c);
  });
}

evsel_status evsel_model_weights(const evsel_model* model, double* out) {
  return guard([&] {
    if (!model || !out) evsel::raise(ErrorCode::argument, "null argument");
    size_t pos = 0;
    for (Index c = 0; c < model->model.k; ++c)
      for (Index d = 0; d < model->model.d; ++d) out[pos++] = model->model.weights(d, c);
  });
}

evsel_status evsel_model_result(const evsel_model* model, size_t class_index,
                                evsel_result** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!model) evsel::raise(ErrorCode::argument, "model handle is null");
    if (model->model.per_class.empty())
      evsel::raise(ErrorCode::argument,
                   "per-class results unavailable (model was loaded from a BMDL file)");
    if (class_index >= model->model.per_class.size())
      evsel::raise(ErrorCode::argument, "class index out of range");
    *out = new evsel_result{model->model.per_class[class_index]};
  });
}

evsel_status evsel_predict(const evsel_model* model, const evsel_bank* bank, double* scores_out) {
  return guard([&] {
    if (!model || !bank || !scores_out) evsel::raise(ErrorCode::argument, "null argument");
    const auto scores = evsel::lssvm::predict_scores(model->model, bank->bank);
    for (Index r = 0; r < scores.count(); ++r)
      for (Index c = 0; c < scores.classes(); ++c)
        scores_out[static_cast<size_t>(r) * static_cast<size_t>(scores.classes()) +
                   static_cast<size_t>(c)] = scores.data(r, c);
  });
}

void evsel_model_free(evsel_model* model) { delete model; }

/* ---- metrics ---- */

evsel_status evsel_metric_accuracy(const double* scores, size_t n, size_t k,
                                   const evsel_labels* labels, double* per_class, double* mean) {
  return metric_common(EVSEL_MEASURE_ACCURACY, scores, n, k, labels, per_class, mean);
}

evsel_status evsel_metric_map(const double* scores, size_t n, size_t k,
                              const evsel_labels* labels, double* per_class, double* mean) {
  return metric_common(EVSEL_MEASURE_MAP, scores, n, k, labels, per_class, mean);
}

evsel_status evsel_metric_auc(const double* scores, size_t n, size_t k,
                              const evsel_labels* labels, double* per_class, double* mean) {
  return metric_common(EVSEL_MEASURE_AUC, scores, n, k, labels, per_class, mean);
}

evsel_status evsel_scores_write_csv(const char* path, const double* scores, size_t n, size_t k) {
  return guard([&] {
    const auto m = to_scores(scores, n, k);
    evsel::dataio::write_scores_csv(m.data, path);
  });
}

evsel_status evsel_scores_read_csv(const char* path, double** scores, size_t* n, size_t* k) {
  if (!scores || !n || !k) return fail_argument("output pointer is null");
  return guard([&] {
    const Eigen::MatrixXd m = evsel::dataio::read_scores_csv(path);
    *n = static_cast<size_t>(m.rows());
    *k = static_cast<size_t>(m.cols());
    *scores = static_cast<double*>(std::malloc(sizeof(double) * (*n) * (*k)));
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c)
        (*scores)[static_cast<size_t>(r) * (*k) + static_cast<size_t>(c)] = m(r, c);
  });
}

/* ---- selection ---- */

evsel_status evsel_candidates_create(const evsel_labels* labels, evsel_candidates** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!labels) evsel::raise(ErrorCode::argument, "labels handle is null");
    *out = new evsel_candidates{evsel::selection::CandidateSet{{}, labels->labels}};
  });
}

evsel_status evsel_candidates_add(evsel_candidates* cands, const evsel_bank* bank) {
  return guard([&] {
    if (!cands || !bank) evsel::raise(ErrorCode::argument, "null argument");
    if (bank->bank.count() != cands->set.labels.count())
      evsel::raise(ErrorCode::dimension, "bank '" + bank->bank.name +
                                             "' sample count does not match the candidate set");
    for (const auto& existing : cands->set.banks)
      if (existing.name == bank->bank.name)
        evsel::raise(ErrorCode::argument, "duplicate bank name '" + bank->bank.name + "'");
    cands->set.banks.push_back(bank->bank);
  });
}

void evsel_candidates_free(evsel_candidates* cands) { delete cands; }

evsel_status evsel_rank_banks(const evsel_candidates* cands, const evsel_optim_options* opts,
                              char** json_out, char** trace_csv_out) {
  return guard([&] {
    if (!cands) evsel::raise(ErrorCode::argument, "candidates handle is null");
    const auto ranking =
        evsel::selection::rank_banks(cands->set, to_optim(opts), to_train_config(opts));
    if (json_out) *json_out = dup_string(evsel::selection::ranking_json(ranking));
    if (trace_csv_out) *trace_csv_out = dup_string(evsel::selection::ranking_trace_csv(ranking));
  });
}

evsel_status evsel_ensemble(const evsel_candidates* cands, const evsel_optim_options* opts,
                            int32_t strategy, evsel_model** model_out, char** json_out) {
  return guard([&] {
    if (!cands) evsel::raise(ErrorCode::argument, "candidates handle is null");
    evsel::selection::Strategy s;
    switch (strategy) {
      case EVSEL_STRATEGY_GREEDY: s = evsel::selection::Strategy::greedy; break;
      case EVSEL_STRATEGY_EXHAUSTIVE: s = evsel::selection::Strategy::exhaustive; break;
      case EVSEL_STRATEGY_SINGLE_BEST: s = evsel::selection::Strategy::single_best; break;
      default: evsel::raise(ErrorCode::argument, "unknown strategy id");
    }
    evsel::selection::EnsembleOptions options;
    options.optim = to_optim(opts);
    options.train = to_train_config(opts);
    auto report = evsel::selection::run_ensemble(cands->set, s, options);
    if (json_out) *json_out = dup_string(evsel::selection::ensemble_report_json(report));
    if (model_out) *model_out = new evsel_model{std::move(report.final_model)};
  });
}

evsel_status evsel_cv_grid_search(const evsel_bank* bank, const evsel_labels* labels,
                                  const double* grid, size_t grid_len, int32_t folds,
                                  uint64_t seed, int32_t mode, char** json_out,
                                  double* chosen_out) {
  return guard([&] {
    if (!bank || !labels || !grid) evsel::raise(ErrorCode::argument, "null argument");
    const std::vector<double> grid_vec(grid, grid + grid_len);
    const auto report = evsel::selection::cv_grid_search(bank->bank, labels->labels, grid_vec,
                                                         folds, seed, to_mode(mode));
    if (json_out) *json_out = dup_string(evsel::selection::cv_report_json(report));
    if (chosen_out)
      for (size_t c = 0; c < report.chosen.size(); ++c) chosen_out[c] = report.chosen[c];
  });
}

/* ---- manifests ---- */

evsel_status evsel_manifest_load(const char* path, evsel_manifest** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] { *out = new evsel_manifest{evsel::dataio::load_manifest(path)}; });
}

const char* evsel_manifest_task(const evsel_manifest* m) {
  return m ? m->manifest.task.c_str() : "";
}

int32_t evsel_manifest_mode(const evsel_manifest* m) {
  if (!m) return EVSEL_MODE_SINGLE_LABEL;
  return m->manifest.mode == evsel::TaskMode::single_label ? EVSEL_MODE_SINGLE_LABEL
                                                           : EVSEL_MODE_MULTI_LABEL;
}

int32_t evsel_manifest_measure(const evsel_manifest* m) {
  if (!m) return EVSEL_MEASURE_ACCURACY;
  switch (m->manifest.measure) {
    case evsel::metrics::Measure::accuracy: return EVSEL_MEASURE_ACCURACY;
    case evsel::metrics::Measure::map: return EVSEL_MEASURE_MAP;
    case evsel::metrics::Measure::auc: return EVSEL_MEASURE_AUC;
  }
  return EVSEL_MEASURE_ACCURACY;
}

size_t evsel_manifest_bank_count(const evsel_manifest* m) {
  return m ? m->manifest.banks.size() : 0;
}

const char* evsel_manifest_bank_name(const evsel_manifest* m, size_t index) {
  if (!m || index >= m->manifest.banks.size()) return "";
  return m->manifest.banks[index].first.c_str();
}

evsel_status evsel_manifest_open_bank(const evsel_manifest* m, size_t index, evsel_bank** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!m) evsel::raise(ErrorCode::argument, "manifest handle is null");
    if (index >= m->manifest.banks.size())
      evsel::raise(ErrorCode::argument, "bank index out of range");
    auto bank = evsel::dataio::read_bank(m->manifest.banks[index].second);
    bank.name = m->manifest.banks[index].first;
    *out = new evsel_bank{std::move(bank)};
  });
}

evsel_status evsel_manifest_open_labels(const evsel_manifest* m, evsel_labels** out) {
  if (!out) return fail_argument("output pointer is null");
  return guard([&] {
    if (!m) evsel::raise(ErrorCode::argument, "manifest handle is null");
    *out = new evsel_labels{evsel::dataio::read_labels(m->manifest.labels_path)};
  });
}

int32_t evsel_manifest_has_split(const evsel_manifest* m) {
  return m && m->manifest.has_split ? 1 : 0;
}

evsel_status evsel_manifest_split(const evsel_manifest* m, int32_t which, size_t** indices,
                                  size_t* count) {
  if (!indices || !count) return fail_argument("output pointer is null");
  return guard([&] {
    if (!m) evsel::raise(ErrorCode::argument, "manifest handle is null");
    if (!m->manifest.has_split) evsel::raise(ErrorCode::argument, "manifest has no split");
    const auto& idx =
        which == EVSEL_SPLIT_TRAIN ? m->manifest.train_indices : m->manifest.test_indices;
    *indices = static_cast<size_t*>(std::malloc(sizeof(size_t) * std::max<size_t>(1, idx.size())));
    for (size_t i = 0; i < idx.size(); ++i) (*indices)[i] = static_cast<size_t>(idx[i]);
    *count = idx.size();
  });
}

void evsel_manifest_free(evsel_manifest* m) { delete m; }

}  // extern "C"
