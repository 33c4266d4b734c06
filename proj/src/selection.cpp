#include "evsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "evsel/log.hpp"
#include "evsel/metrics.hpp"
#include "evsel/parallel.hpp"
#include "evsel/rng.hpp"

namespace evsel::selection {

void CandidateSet::validate() const {
  if (banks.empty()) raise(ErrorCode::argument, "candidate set has no banks");
  std::set<std::string> names;
  for (const auto& b : banks) {
    if (!names.insert(b.name).second)
      raise(ErrorCode::argument, "duplicate bank name '" + b.name + "'");
    if (b.count() != labels.count())
      raise(ErrorCode::dimension, "bank '" + b.name + "' has " + std::to_string(b.count()) +
                                      " samples but labels have " +
                                      std::to_string(labels.count()));
  }
}

const FeatureBank& CandidateSet::bank(const std::string& name) const {
  for (const auto& b : banks)
    if (b.name == name) return b;
  raise(ErrorCode::argument, "unknown bank '" + name + "'");
}

void order_by_evidence(std::vector<std::pair<std::string, double>>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

std::vector<RankedBank> rank_banks(const CandidateSet& set, const evidence::OptimOptions& opts,
                                   const lssvm::TrainConfig& cfg) {
  set.validate();
  std::vector<RankedBank> out(set.banks.size());

  lssvm::TrainConfig per_bank = cfg;
  per_bank.workers = 1;  // parallelism is across banks here
  parallel_for(set.banks.size(), cfg.workers, [&](std::size_t i) {
    RankedBank& r = out[i];
    r.name = set.banks[i].name;
    try {
      r.model = lssvm::train(set.banks[i], set.labels, opts, per_bank);
      r.evidence = r.model.overall_evidence;
    } catch (const Error& e) {
      r.failed = true;
      r.failure = e.what();
      log::warn("bank '" + r.name + "' failed to train: " + r.failure);
    }
  });

  std::stable_sort(out.begin(), out.end(), [](const RankedBank& a, const RankedBank& b) {
    if (a.failed != b.failed) return !a.failed;  // failures sort last
    if (a.failed) return a.name < b.name;
    if (a.evidence != b.evidence) return a.evidence > b.evidence;
    return a.name < b.name;
  });
  return out;
}

FeatureBank concat_banks(const CandidateSet& set, const std::vector<std::string>& names) {
  if (names.empty()) raise(ErrorCode::argument, "cannot concatenate an empty bank subset");
  Index total_d = 0;
  for (const auto& name : names) total_d += set.bank(name).dim();

  Eigen::MatrixXd data(total_d, set.labels.count());
  std::string joined;
  Index row = 0;
  for (const auto& name : names) {
    const FeatureBank& b = set.bank(name);
    data.middleRows(row, b.dim()) = b.data;
    row += b.dim();
    if (!joined.empty()) joined += '+';
    joined += name;
  }
  return FeatureBank{std::move(joined), std::move(data)};
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::greedy: return "greedy";
    case Strategy::exhaustive: return "exhaustive";
    case Strategy::single_best: return "single_best";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "greedy") return Strategy::greedy;
  if (name == "exhaustive") return Strategy::exhaustive;
  if (name == "single_best") return Strategy::single_best;
  raise(ErrorCode::argument, "unknown strategy '" + name + "'");
}

namespace {

// Candidate adds nothing unless the evidence strictly clears a 1e-6 relative
// band; duplicates land inside the band and are rejected.
bool evidence_increased(double before, double after) {
  return after > before + 1e-6 * std::max(std::abs(before), 1.0);
}

}  // namespace

EnsembleReport greedy_ensemble(const CandidateSet& set, const EnsembleOptions& opts) {
  const std::vector<RankedBank> ranked = rank_banks(set, opts.optim, opts.train);

  EnsembleReport report;
  report.strategy = Strategy::greedy;
  report.models_trained = ranked.size();

  std::vector<const RankedBank*> usable;
  for (const auto& r : ranked)
    if (!r.failed) usable.push_back(&r);
  if (usable.empty()) raise(ErrorCode::numerical, "every candidate bank failed to train");

  // Best single bank opens the ensemble unconditionally: an empty model has no
  // defined evidence to compare against.
  report.selected = {usable.front()->name};
  report.final_model = usable.front()->model;
  double current = usable.front()->evidence;
  report.decisions.push_back(
      {usable.front()->name, true, -std::numeric_limits<double>::infinity(), current});

  for (std::size_t i = 1; i < usable.size(); ++i) {
    const std::string& name = usable[i]->name;
    std::vector<std::string> tentative = report.selected;
    tentative.push_back(name);
    lssvm::ClassifierModel candidate;
    double after;
    try {
      candidate = lssvm::train(concat_banks(set, tentative), set.labels, opts.optim, opts.train);
      ++report.models_trained;
      after = candidate.overall_evidence;
    } catch (const Error& e) {
      log::warn("candidate '" + name + "' skipped: " + e.what());
      report.decisions.push_back({name, false, current, std::numeric_limits<double>::quiet_NaN()});
      continue;
    }
    if (evidence_increased(current, after)) {
      report.decisions.push_back({name, true, current, after});
      report.selected = std::move(tentative);
      report.final_model = std::move(candidate);
      current = after;
    } else {
      report.decisions.push_back({name, false, current, after});
    }
  }
  return report;
}

EnsembleReport exhaustive_ensemble(const CandidateSet& set, const EnsembleOptions& opts) {
  set.validate();
  const std::size_t m = set.banks.size();
  if (m > static_cast<std::size_t>(opts.exhaustive_limit))
    raise(ErrorCode::argument, "exhaustive search over " + std::to_string(m) +
                                   " banks exceeds the limit of " +
                                   std::to_string(opts.exhaustive_limit));

  struct SubsetResult {
    std::vector<std::string> names;
    lssvm::ClassifierModel model;
    double evidence = -std::numeric_limits<double>::infinity();
    bool failed = false;
  };
  const std::size_t count = (std::size_t{1} << m) - 1;
  std::vector<SubsetResult> results(count);

  parallel_for(count, opts.train.workers, [&](std::size_t idx) {
    const std::size_t mask = idx + 1;
    SubsetResult& r = results[idx];
    for (std::size_t b = 0; b < m; ++b)
      if (mask & (std::size_t{1} << b)) r.names.push_back(set.banks[b].name);
    try {
      lssvm::TrainConfig cfg = opts.train;
      cfg.workers = 1;
      r.model = lssvm::train(concat_banks(set, r.names), set.labels, opts.optim, cfg);
      r.evidence = r.model.overall_evidence;
    } catch (const Error& e) {
      r.failed = true;
      log::warn("subset '" + (r.names.empty() ? "" : r.names.front()) + "...' failed: " + e.what());
    }
  });

  const SubsetResult* best = nullptr;
  for (const auto& r : results) {
    if (r.failed) continue;
    if (!best || r.evidence > best->evidence ||
        (r.evidence == best->evidence &&
         (r.names.size() < best->names.size() ||
          (r.names.size() == best->names.size() && r.names < best->names))))
      best = &r;
  }
  if (!best) raise(ErrorCode::numerical, "every subset failed to train");

  EnsembleReport report;
  report.strategy = Strategy::exhaustive;
  report.models_trained = count;
  report.selected = best->names;
  report.final_model = best->model;
  for (const auto& r : results)
    if (!r.failed) {
      std::string joined;
      for (const auto& n : r.names) joined += (joined.empty() ? "" : "+") + n;
      report.decisions.push_back(
          {joined, &r == best, -std::numeric_limits<double>::infinity(), r.evidence});
    }
  return report;
}

EnsembleReport single_best(const CandidateSet& set, const EnsembleOptions& opts) {
  const std::vector<RankedBank> ranked = rank_banks(set, opts.optim, opts.train);
  const auto it = std::find_if(ranked.begin(), ranked.end(),
                               [](const RankedBank& r) { return !r.failed; });
  if (it == ranked.end()) raise(ErrorCode::numerical, "every candidate bank failed to train");

  EnsembleReport report;
  report.strategy = Strategy::single_best;
  report.models_trained = ranked.size();
  report.selected = {it->name};
  report.final_model = it->model;
  for (const auto& r : ranked)
    if (!r.failed)
      report.decisions.push_back({r.name, &r == &*it,
                                  -std::numeric_limits<double>::infinity(), r.evidence});
  return report;
}

EnsembleReport run_ensemble(const CandidateSet& set, Strategy strategy,
                            const EnsembleOptions& opts) {
  switch (strategy) {
    case Strategy::greedy: return greedy_ensemble(set, opts);
    case Strategy::exhaustive: return exhaustive_ensemble(set, opts);
    case Strategy::single_best: return single_best(set, opts);
  }
  raise(ErrorCode::argument, "unknown strategy");
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int e = -10; e <= 10; ++e) grid.push_back(std::pow(2.0, e));
  return grid;
}

CvReport cv_grid_search(const FeatureBank& bank, const LabelMatrix& labels,
                        const std::vector<double>& grid, int folds, std::uint64_t seed,
                        TaskMode mode) {
  if (grid.empty()) raise(ErrorCode::argument, "empty lambda grid");
  for (double g : grid)
    if (!(g > 0.0)) raise(ErrorCode::argument, "grid lambdas must be positive");
  if (folds < 2) raise(ErrorCode::argument, "folds must be >= 2");
  if (labels.count() < folds) raise(ErrorCode::argument, "fewer samples than folds");
  if (bank.count() != labels.count())
    raise(ErrorCode::dimension, "bank and labels disagree on sample count");
  labels.require_trainable();

  const Index n = labels.count();
  const Index k = labels.classes();
  const Index g = static_cast<Index>(grid.size());

  // Fold assignment. Single-label: per-class seeded shuffle dealt round-robin
  // (as stratified as the counts allow). Multi-label: one shuffle, contiguous blocks.
  std::vector<int> fold_of(static_cast<std::size_t>(n), 0);
  rng::Generator gen(seed);
  if (mode == TaskMode::single_label && labels.is_one_hot()) {
    int next_fold = 0;
    for (Index c = 0; c < k; ++c) {
      std::vector<Index> members;
      for (Index i = 0; i < n; ++i)
        if (labels.data(i, c) == 1) members.push_back(i);
      gen.shuffle(members);
      for (Index idx : members) fold_of[static_cast<std::size_t>(idx)] = next_fold++ % folds;
    }
  } else {
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    gen.shuffle(order);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      fold_of[static_cast<std::size_t>(order[pos])] =
          static_cast<int>(pos * static_cast<std::size_t>(folds) / order.size());
  }

  Eigen::MatrixXd score_sum = Eigen::MatrixXd::Zero(g, k);
  Eigen::MatrixXd score_count = Eigen::MatrixXd::Zero(g, k);

  for (int fold = 0; fold < folds; ++fold) {
    std::vector<Index> train_idx, val_idx;
    for (Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == fold ? val_idx : train_idx).push_back(i);
    if (val_idx.empty() || train_idx.empty()) continue;

    const FeatureBank train_bank = dataio::select_columns(bank, train_idx);
    const LabelMatrix train_labels = dataio::select_rows(labels, train_idx);
    const FeatureBank val_bank = dataio::select_columns(bank, val_idx);
    const LabelMatrix val_labels = dataio::select_rows(labels, val_idx);

    // One decomposition per fold, reused across every grid point and class.
    const spectral::EigenBasis basis = spectral::build_basis(train_bank, train_labels);

    for (Index gi = 0; gi < g; ++gi) {
      Eigen::MatrixXd weights(bank.dim(), k);
      for (Index c = 0; c < k; ++c) weights.col(c) = lssvm::solve_weights(basis, c, grid[gi]);
      const Eigen::MatrixXd scores = val_bank.data.transpose() * weights;

      if (mode == TaskMode::single_label) {
        // One shared validation number per lambda: overall argmax accuracy.
        // Per-class regularizers cannot be validated independently here, since
        // the argmax compares score scales across classes.
        double correct = 0.0;
        Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
        for (Index v = 0; v < scores.rows(); ++v) {
          Index truth = 0;
          for (Index c = 0; c < k; ++c)
            if (val_labels.data(v, c) == 1) truth = c;
          Index pred = 0;
          scores.row(v).maxCoeff(&pred);
          total(truth) += 1.0;
          if (pred == truth) correct += 1.0;
        }
        for (Index c = 0; c < k; ++c)
          if (total(c) == 0.0 && gi == 0)
            log::warn("fold " + std::to_string(fold) + ": class " + std::to_string(c) +
                      " absent from validation split; scoring it on the remaining folds");
        const double acc = correct / static_cast<double>(scores.rows());
        for (Index c = 0; c < k; ++c) {
          score_sum(gi, c) += acc;
          score_count(gi, c) += 1.0;
        }
      } else {
        // Balanced accuracy at threshold 0.5 per class.
        for (Index c = 0; c < k; ++c) {
          double tp = 0, fn = 0, tn = 0, fp = 0;
          for (Index v = 0; v < scores.rows(); ++v) {
            const bool pos = val_labels.data(v, c) == 1;
            const bool pred = scores(v, c) >= 0.5;
            if (pos && pred) ++tp;
            else if (pos) ++fn;
            else if (pred) ++fp;
            else ++tn;
          }
          if (tp + fn == 0.0 || tn + fp == 0.0) {
            if (gi == 0)
              log::warn("fold " + std::to_string(fold) + ": class " + std::to_string(c) +
                        " one-sided in validation split; scoring it on the remaining folds");
            continue;
          }
          score_sum(gi, c) += 0.5 * (tp / (tp + fn) + tn / (tn + fp));
          score_count(gi, c) += 1.0;
        }
      }
    }
  }

  CvReport report;
  report.grid = grid;
  report.folds = folds;
  report.fold_assignment_seed = seed;
  report.per_lambda_scores = Eigen::MatrixXd::Zero(g, k);
  report.chosen.resize(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    Index best = 0;
    double best_score = -1.0;
    for (Index gi = 0; gi < g; ++gi) {
      const double mean =
          score_count(gi, c) > 0.0 ? score_sum(gi, c) / score_count(gi, c) : 0.0;
      report.per_lambda_scores(gi, c) = mean;
      if (mean > best_score) {  // strict: first index wins ties
        best_score = mean;
        best = gi;
      }
    }
    report.chosen[static_cast<std::size_t>(c)] = grid[static_cast<std::size_t>(best)];
  }
  return report;
}

namespace {

std::string sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

nlohmann::ordered_json decision_json(const Decision& d) {
  nlohmann::ordered_json j;
  j["bank"] = d.bank;
  j["action"] = d.accepted ? "accept" : "reject";
  if (std::isfinite(d.evidence_before))
    j["evidence_before"] = sig12(d.evidence_before);
  else
    j["evidence_before"] = nullptr;
  if (std::isnan(d.evidence_after))
    j["evidence_after"] = nullptr;
  else
    j["evidence_after"] = sig12(d.evidence_after);
  return j;
}

}  // namespace

std::string ensemble_report_json(const EnsembleReport& report) {
  nlohmann::ordered_json doc;
  doc["strategy"] = strategy_name(report.strategy);
  doc["decisions"] = nlohmann::ordered_json::array();
  for (const auto& d : report.decisions) doc["decisions"].push_back(decision_json(d));
  doc["selected"] = report.selected;
  doc["overall_evidence"] = sig12(report.final_model.overall_evidence);
  doc["models_trained"] = report.models_trained;
  nlohmann::ordered_json lambdas = nlohmann::ordered_json::array();
  for (Index c = 0; c < report.final_model.k; ++c)
    lambdas.push_back(report.final_model.lambdas(c));
  doc["lambdas"] = std::move(lambdas);
  return doc.dump(2) + "\n";
}

std::string ranking_json(const std::vector<RankedBank>& ranking) {
  nlohmann::ordered_json doc;
  doc["banks"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json order = nlohmann::ordered_json::array();
  for (const auto& r : ranking) {
    nlohmann::ordered_json b;
    b["name"] = r.name;
    if (r.failed) {
      b["failed"] = true;
      b["error"] = r.failure;
    } else {
      order.push_back(r.name);
      b["overall_evidence"] = sig12(r.evidence);
      b["classes"] = nlohmann::ordered_json::array();
      for (const auto& cr : r.model.per_class) {
        nlohmann::ordered_json c;
        c["class"] = cr.class_index;
        c["lambda"] = cr.state.lambda;
        c["alpha"] = cr.state.alpha;
        c["beta"] = cr.state.beta;
        c["gamma"] = cr.state.gamma;
        c["log_evidence"] = sig12(cr.state.log_evidence);
        c["iterations"] = cr.iterations;
        c["converged"] = cr.converged;
        c["fallbacks"] = cr.fallback_count;
        b["classes"].push_back(std::move(c));
      }
    }
    doc["banks"].push_back(std::move(b));
  }
  doc["ranking"] = std::move(order);
  return doc.dump(2) + "\n";
}

std::string ranking_trace_csv(const std::vector<RankedBank>& ranking) {
  std::string csv = "bank,class,iteration,lambda,log_evidence\n";
  char buf[96];
  for (const auto& r : ranking) {
    if (r.failed) continue;
    for (const auto& cr : r.model.per_class)
      for (const auto& t : cr.trace) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g,%.17g\n", r.name.c_str(), cr.class_index,
                      t.iteration, t.lambda, t.log_evidence);
        csv += buf;
      }
  }
  return csv;
}

std::string cv_report_json(const CvReport& report) {
  nlohmann::ordered_json doc;
  doc["grid"] = report.grid;
  doc["folds"] = report.folds;
  doc["fold_assignment_seed"] = report.fold_assignment_seed;
  doc["chosen"] = report.chosen;
  doc["per_lambda_scores"] = nlohmann::ordered_json::array();
  for (Index gi = 0; gi < report.per_lambda_scores.rows(); ++gi) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Index c = 0; c < report.per_lambda_scores.cols(); ++c)
      row.push_back(report.per_lambda_scores(gi, c));
    doc["per_lambda_scores"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

}  // namespace evsel::selection
