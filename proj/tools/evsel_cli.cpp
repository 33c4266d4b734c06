// evsel-cli — command-line front end for the evsel shared library.
//
// Subcommands: evidence, train, predict, eval, select, ensemble, cv,
// bench-convergence, synth. Exit codes: 0 success, 2 input/usage error,
// 3 numerical failure. All functionality goes through the C API (evsel.h).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evsel.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(evsel_status status) {
  switch (status) {
    case EVSEL_OK: return 0;
    case EVSEL_ERR_ARGUMENT:
    case EVSEL_ERR_DIMENSION:
    case EVSEL_ERR_IO:
    case EVSEL_ERR_FORMAT: return kExitUsage;
    default: return kExitNumerical;
  }
}

[[noreturn]] void die(evsel_status status, const std::string& context) {
  std::fprintf(stderr, "evsel-cli: %s: %s\n", context.c_str(), evsel_last_error());
  std::exit(exit_code_for(status));
}

void check(evsel_status status, const std::string& context) {
  if (status != EVSEL_OK) die(status, context);
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::fprintf(stderr, "evsel-cli: %s\n", msg.c_str());
  std::exit(kExitUsage);
}

// RAII wrappers around the opaque handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { Free(ptr); }
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    std::swap(ptr, other.ptr);
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T* get() const { return ptr; }
  T** slot() { return &ptr; }
};

using Bank = Handle<evsel_bank, evsel_bank_free>;
using Labels = Handle<evsel_labels, evsel_labels_free>;
using Basis = Handle<evsel_basis, evsel_basis_free>;
using Result = Handle<evsel_result, evsel_result_free>;
using Model = Handle<evsel_model, evsel_model_free>;
using Candidates = Handle<evsel_candidates, evsel_candidates_free>;
using Manifest = Handle<evsel_manifest, evsel_manifest_free>;

struct CString {
  char* ptr = nullptr;
  ~CString() { evsel_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct IndexBuffer {
  size_t* ptr = nullptr;
  size_t count = 0;
  ~IndexBuffer() { evsel_free(ptr); }
};

struct CommonOptions {
  std::string manifest_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int workers = 1;
  double lambda_init = 1.0;
  double epsilon = 1e-5;
  int max_iters = 500;
  std::string method = "aitken";
  bool accept_unconverged = false;
};

int32_t method_id(const std::string& name) {
  if (name == "aitken") return EVSEL_METHOD_AITKEN;
  if (name == "lambda_plain") return EVSEL_METHOD_LAMBDA_PLAIN;
  if (name == "fixed_point_ab") return EVSEL_METHOD_FIXED_POINT_AB;
  if (name == "em") return EVSEL_METHOD_EM;
  usage_error("unknown --method '" + name + "'");
}

evsel_optim_options make_options(const CommonOptions& common) {
  evsel_optim_options opts;
  evsel_optim_options_init(&opts);
  opts.lambda_init = common.lambda_init;
  opts.epsilon = common.epsilon;
  opts.max_iters = common.max_iters;
  opts.method = method_id(common.method);
  opts.accept_unconverged = common.accept_unconverged ? 1 : 0;
  opts.workers = common.workers;
  return opts;
}

void add_common_flags(CLI::App* cmd, CommonOptions& common, bool needs_manifest = true) {
  if (needs_manifest)
    cmd->add_option("--manifest", common.manifest_path, "dataset manifest (JSON)")->required();
  cmd->add_option("--out", common.out_dir, "output directory (default: .)");
  cmd->add_option("--seed", common.seed, "seed for all randomized steps");
  cmd->add_option("--workers", common.workers, "parallel width (default 1)");
  cmd->add_option("--lambda-init", common.lambda_init, "optimizer start point (default 1)");
  cmd->add_option("--epsilon", common.epsilon, "lambda convergence tolerance (default 1e-5)");
  cmd->add_option("--max-iters", common.max_iters, "iteration cap (default 500)");
  cmd->add_option("--method", common.method,
                  "aitken | lambda_plain | fixed_point_ab | em (default aitken)");
  cmd->add_flag("--accept-unconverged", common.accept_unconverged,
                "keep classes that hit the iteration cap instead of aborting");
}

std::string out_path(const CommonOptions& common, const std::string& name) {
  std::filesystem::create_directories(common.out_dir);
  return (std::filesystem::path(common.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) usage_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) usage_error("write failed on '" + path + "'");
}

struct LoadedDataset {
  Manifest manifest;
  Labels labels;
  std::vector<std::string> bank_names;
  std::vector<Bank> banks;  // full sample set, manifest order
};

LoadedDataset load_dataset(const std::string& manifest_path) {
  LoadedDataset ds;
  check(evsel_manifest_load(manifest_path.c_str(), ds.manifest.slot()), "loading manifest");
  check(evsel_manifest_open_labels(ds.manifest.get(), ds.labels.slot()), "loading labels");
  const size_t count = evsel_manifest_bank_count(ds.manifest.get());
  for (size_t i = 0; i < count; ++i) {
    ds.bank_names.emplace_back(evsel_manifest_bank_name(ds.manifest.get(), i));
    Bank bank;
    check(evsel_manifest_open_bank(ds.manifest.get(), i, bank.slot()), "loading bank");
    ds.banks.push_back(std::move(bank));
  }
  return ds;
}

// Restricts the dataset to one side of the manifest split (if any).
struct SplitView {
  Labels labels;            // owned when restricted
  std::vector<Bank> banks;  // owned when restricted
  const evsel_labels* labels_ptr = nullptr;
  std::vector<const evsel_bank*> bank_ptrs;
};

SplitView make_view(const LoadedDataset& ds, int32_t which, bool restrict_to_split) {
  SplitView view;
  if (restrict_to_split && evsel_manifest_has_split(ds.manifest.get())) {
    IndexBuffer idx;
    check(evsel_manifest_split(ds.manifest.get(), which, &idx.ptr, &idx.count), "reading split");
    if (idx.count == 0) usage_error("manifest split side is empty");
    check(evsel_labels_select(ds.labels.get(), idx.ptr, idx.count, view.labels.slot()),
          "selecting label rows");
    view.labels_ptr = view.labels.get();
    for (const auto& bank : ds.banks) {
      Bank restricted;
      check(evsel_bank_select(bank.get(), idx.ptr, idx.count, restricted.slot()),
            "selecting bank columns");
      view.bank_ptrs.push_back(restricted.get());
      view.banks.push_back(std::move(restricted));
    }
  } else {
    view.labels_ptr = ds.labels.get();
    for (const auto& bank : ds.banks) view.bank_ptrs.push_back(bank.get());
  }
  return view;
}

Bank concat_by_names(const LoadedDataset& ds, const SplitView& view,
                     const std::vector<std::string>& names) {
  std::vector<const evsel_bank*> selected;
  for (const auto& name : names) {
    bool found = false;
    for (size_t i = 0; i < ds.bank_names.size(); ++i)
      if (ds.bank_names[i] == name) {
        selected.push_back(view.bank_ptrs[i]);
        found = true;
        break;
      }
    if (!found) usage_error("bank '" + name + "' is not in the manifest");
  }
  Bank out;
  check(evsel_bank_concat(selected.data(), selected.size(), out.slot()), "concatenating banks");
  return out;
}

std::vector<std::string> split_names(const std::string& joined) {
  std::vector<std::string> names;
  std::string cur;
  for (char ch : joined) {
    if (ch == '+') {
      names.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  names.push_back(cur);
  return names;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.rfind("pow2:", 0) == 0) {
    const auto rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) usage_error("--grid pow2 form is pow2:<lo>:<hi>");
    const int lo = std::stoi(rest.substr(0, colon));
    const int hi = std::stoi(rest.substr(colon + 1));
    if (hi < lo) usage_error("--grid pow2 range is empty");
    for (int e = lo; e <= hi; ++e) grid.push_back(std::exp2(e));
    return grid;
  }
  std::string cur;
  for (char ch : spec + ",") {
    if (ch == ',') {
      if (!cur.empty()) grid.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (grid.empty()) usage_error("--grid is empty");
  return grid;
}

std::string measure_name(int32_t measure) {
  switch (measure) {
    case EVSEL_MEASURE_ACCURACY: return "accuracy";
    case EVSEL_MEASURE_MAP: return "map";
    case EVSEL_MEASURE_AUC: return "auc";
  }
  return "unknown";
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Candidates build_candidates(const SplitView& view) {
  Candidates cands;
  check(evsel_candidates_create(view.labels_ptr, cands.slot()), "building candidate set");
  for (const auto* bank : view.bank_ptrs)
    check(evsel_candidates_add(cands.get(), bank), "adding candidate bank");
  return cands;
}

/* ---- subcommands -------------------------------------------------------- */

int cmd_evidence(const CommonOptions& common) {
  const auto ds = load_dataset(common.manifest_path);
  const auto view = make_view(ds, EVSEL_SPLIT_TRAIN, true);
  const auto cands = build_candidates(view);
  const auto opts = make_options(common);

  CString json, csv;
  check(evsel_rank_banks(cands.get(), &opts, &json.ptr, &csv.ptr), "ranking banks");
  write_text(out_path(common, "evidence.json"), json.str());
  write_text(out_path(common, "traces.csv"), csv.str());
  std::printf("wrote %s and %s\n", out_path(common, "evidence.json").c_str(),
              out_path(common, "traces.csv").c_str());
  return 0;
}

int cmd_train(const CommonOptions& common, const std::string& banks_arg) {
  const auto ds = load_dataset(common.manifest_path);
  const auto view = make_view(ds, EVSEL_SPLIT_TRAIN, true);
  const auto names = banks_arg.empty() ? ds.bank_names : split_names(banks_arg);
  const Bank bank = concat_by_names(ds, view, names);
  const auto opts = make_options(common);

  Model model;
  check(evsel_train(bank.get(), view.labels_ptr, &opts, model.slot()), "training");
  const auto path = out_path(common, "model.bmdl");
  check(evsel_model_save(model.get(), path.c_str()), "saving model");
  std::printf("trained %s (D=%zu, K=%zu, evidence %.6g), wrote %s\n",
              evsel_model_signature(model.get()), evsel_model_dim(model.get()),
              evsel_model_classes(model.get()), evsel_model_evidence(model.get()), path.c_str());
  return 0;
}

int cmd_predict(const CommonOptions& common, const std::string& model_path,
                const std::string& split) {
  const auto ds = load_dataset(common.manifest_path);
  Model model;
  check(evsel_model_load(model_path.c_str(), model.slot()), "loading model");

  const bool restrict = split != "all";
  const auto which = split == "train" ? EVSEL_SPLIT_TRAIN : EVSEL_SPLIT_TEST;
  const auto view = make_view(ds, which, restrict);
  const Bank bank = concat_by_names(ds, view, split_names(evsel_model_signature(model.get())));

  const size_t n = evsel_bank_samples(bank.get());
  const size_t k = evsel_model_classes(model.get());
  std::vector<double> scores(n * k);
  check(evsel_predict(model.get(), bank.get(), scores.data()), "predicting");
  const auto path = out_path(common, "scores.csv");
  check(evsel_scores_write_csv(path.c_str(), scores.data(), n, k), "writing scores");
  std::printf("wrote %zu x %zu scores to %s\n", n, k, path.c_str());
  return 0;
}

int cmd_eval(const CommonOptions& common, const std::string& scores_path,
             const std::string& split) {
  const auto ds = load_dataset(common.manifest_path);
  const bool restrict = split != "all";
  const auto which = split == "train" ? EVSEL_SPLIT_TRAIN : EVSEL_SPLIT_TEST;
  const auto view = make_view(ds, which, restrict);

  double* raw = nullptr;
  size_t n = 0, k = 0;
  check(evsel_scores_read_csv(scores_path.c_str(), &raw, &n, &k), "reading scores");
  std::unique_ptr<double, decltype(&evsel_free)> scores(raw, &evsel_free);

  const int32_t measure = evsel_manifest_measure(ds.manifest.get());
  std::vector<double> per_class(k);
  double mean = 0.0;
  evsel_status st;
  switch (measure) {
    case EVSEL_MEASURE_MAP:
      st = evsel_metric_map(scores.get(), n, k, view.labels_ptr, per_class.data(), &mean);
      break;
    case EVSEL_MEASURE_AUC:
      st = evsel_metric_auc(scores.get(), n, k, view.labels_ptr, per_class.data(), &mean);
      break;
    default:
      st = evsel_metric_accuracy(scores.get(), n, k, view.labels_ptr, per_class.data(), &mean);
      break;
  }
  check(st, "evaluating");

  nlohmann::ordered_json doc;
  doc["task"] = evsel_manifest_task(ds.manifest.get());
  doc["measure"] = measure_name(measure);
  doc["split"] = split;
  doc["mean"] = mean;
  doc["per_class"] = per_class;
  write_text(out_path(common, "eval.json"), doc.dump(2) + "\n");
  std::printf("%s (%s split): %.6f\n", measure_name(measure).c_str(), split.c_str(), mean);
  return 0;
}

int cmd_ensemble(const CommonOptions& common, const std::string& strategy) {
  int32_t strategy_id = EVSEL_STRATEGY_GREEDY;
  if (strategy == "greedy")
    strategy_id = EVSEL_STRATEGY_GREEDY;
  else if (strategy == "exhaustive")
    strategy_id = EVSEL_STRATEGY_EXHAUSTIVE;
  else if (strategy == "single_best")
    strategy_id = EVSEL_STRATEGY_SINGLE_BEST;
  else
    usage_error("unknown --strategy '" + strategy + "'");

  const auto ds = load_dataset(common.manifest_path);
  const auto view = make_view(ds, EVSEL_SPLIT_TRAIN, true);
  const auto cands = build_candidates(view);
  const auto opts = make_options(common);

  Model model;
  CString json;
  check(evsel_ensemble(cands.get(), &opts, strategy_id, model.slot(), &json.ptr),
        "building ensemble");
  const auto report_path = out_path(
      common, strategy_id == EVSEL_STRATEGY_SINGLE_BEST ? "selection.json" : "ensemble.json");
  write_text(report_path, json.str());
  const auto model_path = out_path(common, "model.bmdl");
  check(evsel_model_save(model.get(), model_path.c_str()), "saving model");
  std::printf("selected %s (evidence %.6g), wrote %s and %s\n",
              evsel_model_signature(model.get()), evsel_model_evidence(model.get()),
              report_path.c_str(), model_path.c_str());
  return 0;
}

int cmd_cv(const CommonOptions& common, const std::string& grid_spec, int folds,
           const std::string& banks_arg) {
  const auto ds = load_dataset(common.manifest_path);
  const auto view = make_view(ds, EVSEL_SPLIT_TRAIN, true);
  const auto names = banks_arg.empty() ? ds.bank_names : split_names(banks_arg);
  const Bank bank = concat_by_names(ds, view, names);
  const auto grid = parse_grid(grid_spec);
  const auto mode = evsel_manifest_mode(ds.manifest.get());
  const size_t k = evsel_labels_classes(view.labels_ptr);

  // warm-up run excluded from both timings
  {
    CString warm;
    check(evsel_cv_grid_search(bank.get(), view.labels_ptr, grid.data(),
                               std::min<size_t>(grid.size(), 2), folds, common.seed, mode,
                               &warm.ptr, nullptr),
          "cv warm-up");
  }

  CString cv_json;
  std::vector<double> chosen(k);
  const double cv_start = now_ms();
  check(evsel_cv_grid_search(bank.get(), view.labels_ptr, grid.data(), grid.size(), folds,
                             common.seed, mode, &cv_json.ptr, chosen.data()),
        "cv grid search");
  const double cv_ms = now_ms() - cv_start;

  const auto opts = make_options(common);
  Model model;
  const double ev_start = now_ms();
  check(evsel_train(bank.get(), view.labels_ptr, &opts, model.slot()), "evidence training");
  const double ev_ms = now_ms() - ev_start;

  std::vector<double> ev_lambdas(k);
  check(evsel_model_lambdas(model.get(), ev_lambdas.data()), "reading lambdas");

  nlohmann::ordered_json doc;
  doc["cv"] = nlohmann::ordered_json::parse(cv_json.str());
  doc["cv_wall_ms"] = cv_ms;
  doc["evidence_lambdas"] = ev_lambdas;
  doc["evidence_wall_ms"] = ev_ms;
  write_text(out_path(common, "cv.json"), doc.dump(2) + "\n");
  std::printf("cv: %.1f ms over %zu grid points x %d folds; evidence: %.1f ms\n", cv_ms,
              grid.size(), folds, ev_ms);
  return 0;
}

int cmd_bench(const CommonOptions& common, std::uint64_t n, std::uint64_t d, std::uint64_t k,
              double noise, int seeds) {
  static const char* method_names[] = {"aitken", "lambda_plain", "fixed_point_ab", "em"};
  static const int32_t method_ids[] = {EVSEL_METHOD_AITKEN, EVSEL_METHOD_LAMBDA_PLAIN,
                                       EVSEL_METHOD_FIXED_POINT_AB, EVSEL_METHOD_EM};

  std::string csv = "method,seed,iteration,lambda,log_evidence,elapsed_ms\n";
  char line[160];
  for (int s = 0; s < seeds; ++s) {
    evsel_synth_spec spec;
    evsel_synth_spec_init(&spec);
    spec.n = n;
    spec.d = d;
    spec.k = k;
    spec.noise_level = noise;
    spec.informative_fraction = 0.6;
    spec.seed = common.seed + static_cast<std::uint64_t>(s);
    spec.nonneg_l2 = 1;

    Bank bank;
    Labels labels;
    check(evsel_synth_generate(&spec, bank.slot(), labels.slot(), nullptr, nullptr),
          "generating benchmark problem");
    Basis basis;
    check(evsel_basis_build(bank.get(), labels.get(), basis.slot()), "building basis");

    evsel_optim_options opts = make_options(common);
    {
      Result warm;  // warm-up excluded from the rows
      opts.method = EVSEL_METHOD_AITKEN;
      check(evsel_optimize_lambda(basis.get(), 0, &opts, warm.slot()), "warm-up");
    }

    for (int m = 0; m < 4; ++m) {
      opts.method = method_ids[m];
      Result result;
      check(evsel_optimize_lambda(basis.get(), 0, &opts, result.slot()), "optimizing");
      const size_t len = evsel_result_trace_size(result.get());
      std::vector<double> lambdas(len), evidences(len), elapsed(len);
      check(evsel_result_trace(result.get(), lambdas.data(), evidences.data(), elapsed.data()),
            "reading trace");
      for (size_t i = 0; i < len; ++i) {
        std::snprintf(line, sizeof(line), "%s,%d,%zu,%.17g,%.17g,%.6g\n", method_names[m], s, i,
                      lambdas[i], evidences[i], elapsed[i]);
        csv += line;
      }
    }
  }
  const auto path = out_path(common, "bench.csv");
  write_text(path, csv);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_synth(const CommonOptions& common, std::uint64_t n, std::uint64_t d, std::uint64_t k,
              const std::string& noise_list, double informative, bool nonneg) {
  std::vector<double> noise_levels;
  std::string cur;
  for (char ch : noise_list + ",") {
    if (ch == ',') {
      if (!cur.empty()) noise_levels.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (noise_levels.empty()) usage_error("--noise list is empty");

  evsel_synth_spec spec;
  evsel_synth_spec_init(&spec);
  spec.n = n;
  spec.d = d;
  spec.k = k;
  spec.noise_level = noise_levels[0];
  spec.informative_fraction = informative;
  spec.seed = common.seed;
  spec.nonneg_l2 = nonneg ? 1 : 0;

  Bank first;
  Labels labels;
  IndexBuffer test_idx;
  check(evsel_synth_generate(&spec, first.slot(), labels.slot(), &test_idx.ptr, &test_idx.count),
        "generating data");
  check(evsel_labels_write(labels.get(), out_path(common, "labels.lbls").c_str()),
        "writing labels");

  nlohmann::ordered_json manifest;
  manifest["task"] = "synthetic";
  manifest["mode"] = "single_label";
  manifest["measure"] = "accuracy";
  manifest["labels"] = "labels.lbls";
  manifest["banks"] = nlohmann::ordered_json::array();

  for (size_t b = 0; b < noise_levels.size(); ++b) {
    Bank bank;
    if (b == 0) {
      bank = std::move(first);
    } else {
      evsel_synth_spec bank_spec = spec;
      bank_spec.noise_level = noise_levels[b];
      bank_spec.seed = common.seed + 1000 * b;
      check(evsel_synth_generate_bank(&bank_spec, labels.get(), nullptr, bank.slot()),
            "generating bank");
    }
    const std::string name = "bank" + std::to_string(b);
    const std::string file = name + ".fbnk";
    check(evsel_bank_write(bank.get(), out_path(common, file).c_str()), "writing bank");
    manifest["banks"].push_back({{"name", name}, {"path", file}});
  }

  std::vector<size_t> test(test_idx.ptr, test_idx.ptr + test_idx.count);
  std::vector<size_t> train;
  for (size_t i = 0; i < n; ++i)
    if (!std::binary_search(test.begin(), test.end(), i)) train.push_back(i);
  manifest["split"]["train"] = train;
  manifest["split"]["test"] = test;

  write_text(out_path(common, "manifest.json"), manifest.dump(2) + "\n");
  std::printf("wrote %zu bank(s), labels, and manifest under %s\n", noise_levels.size(),
              common.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LS-SVM training with evidence-based regularization and bank selection"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* evidence = app.add_subcommand("evidence", "rank manifest banks by overall evidence");
  add_common_flags(evidence, common);

  auto* train = app.add_subcommand("train", "train a model and write model.bmdl");
  add_common_flags(train, common);
  std::string banks_arg;
  train->add_option("--banks", banks_arg, "subset of manifest banks, joined with '+'");

  auto* predict = app.add_subcommand("predict", "score samples with a trained model");
  add_common_flags(predict, common);
  std::string model_path;
  std::string split = "test";
  predict->add_option("--model", model_path, "BMDL model file")->required();
  predict->add_option("--split", split, "train | test | all (default test)");

  auto* eval = app.add_subcommand("eval", "evaluate a scores CSV with the manifest's measure");
  add_common_flags(eval, common);
  std::string scores_path;
  eval->add_option("--scores", scores_path, "scores CSV from predict")->required();
  eval->add_option("--split", split, "train | test | all (default test)");

  auto* select = app.add_subcommand("select", "pick the single best bank by evidence");
  add_common_flags(select, common);

  auto* ensemble = app.add_subcommand("ensemble", "greedy or exhaustive bank ensemble");
  add_common_flags(ensemble, common);
  std::string strategy = "greedy";
  ensemble->add_option("--strategy", strategy, "greedy | exhaustive (default greedy)");

  auto* cv = app.add_subcommand("cv", "cross-validation grid-search baseline with timings");
  add_common_flags(cv, common);
  std::string grid_spec = "pow2:-10:10";
  int folds = 5;
  cv->add_option("--grid", grid_spec, "pow2:<lo>:<hi> or comma-separated lambdas");
  cv->add_option("--folds", folds, "fold count (default 5)");
  cv->add_option("--banks", banks_arg, "subset of manifest banks, joined with '+'");

  auto* bench =
      app.add_subcommand("bench-convergence", "per-iteration traces of all four optimizers");
  add_common_flags(bench, common, false);
  std::uint64_t bench_n = 200, bench_d = 50, bench_k = 3;
  double bench_noise = 0.5;
  int bench_seeds = 20;
  bench->add_option("--n", bench_n, "samples per problem (default 200)");
  bench->add_option("--d", bench_d, "feature dims (default 50)");
  bench->add_option("--k", bench_k, "classes (default 3)");
  bench->add_option("--noise", bench_noise, "noise level (default 0.5)");
  bench->add_option("--seeds", bench_seeds, "number of seeded problems (default 20)");

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic dataset + manifest");
  add_common_flags(synth, common, false);
  std::uint64_t synth_n = 200, synth_d = 32, synth_k = 3;
  std::string synth_noise = "0.3";
  double synth_informative = 0.6;
  bool synth_nonneg = true;
  synth->add_option("--n", synth_n, "samples (default 200)");
  synth->add_option("--d", synth_d, "feature dims per bank (default 32)");
  synth->add_option("--k", synth_k, "classes (default 3)");
  synth->add_option("--noise", synth_noise, "comma list; one bank per level (default 0.3)");
  synth->add_option("--informative", synth_informative, "informative dim fraction (default 0.6)");
  synth->add_flag("--nonneg-l2,!--no-nonneg-l2", synth_nonneg,
                  "nonnegative unit-norm columns (default on)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (evidence->parsed()) return cmd_evidence(common);
    if (train->parsed()) return cmd_train(common, banks_arg);
    if (predict->parsed()) return cmd_predict(common, model_path, split);
    if (eval->parsed()) return cmd_eval(common, scores_path, split);
    if (select->parsed()) return cmd_ensemble(common, "single_best");
    if (ensemble->parsed()) return cmd_ensemble(common, strategy);
    if (cv->parsed()) return cmd_cv(common, grid_spec, folds, banks_arg);
    if (bench->parsed())
      return cmd_bench(common, bench_n, bench_d, bench_k, bench_noise, bench_seeds);
    if (synth->parsed())
      return cmd_synth(common, synth_n, synth_d, synth_k, synth_noise, synth_informative,
                       synth_nonneg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "evsel-cli: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
