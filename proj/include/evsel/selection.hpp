#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsel/dataio.hpp"
#include "evsel/lssvm.hpp"
#include "evsel/types.hpp"

namespace evsel::selection {

/// Named feature banks over the same samples plus shared labels.
struct CandidateSet {
  std::vector<FeatureBank> banks;
  LabelMatrix labels;

  // Checks shared N and unique names.
  void validate() const;
  const FeatureBank& bank(const std::string& name) const;
};

struct RankedBank {
  std::string name;
  double evidence = 0.0;
  lssvm::ClassifierModel model;
  bool failed = false;
  std::string failure;
};

/// Sort order used for rankings: descending evidence, ties broken by name.
void order_by_evidence(std::vector<std::pair<std::string, double>>& entries);

/// Trains one model per bank and ranks by overall evidence. Banks that fail to
/// train are flagged and sorted last.
std::vector<RankedBank> rank_banks(const CandidateSet& set,
                                   const evidence::OptimOptions& opts = {},
                                   const lssvm::TrainConfig& cfg = {});

/// Row-wise stacking of the named banks, in the given order; the result is
/// named by joining with '+'.
FeatureBank concat_banks(const CandidateSet& set, const std::vector<std::string>& names);

enum class Strategy { greedy, exhaustive, single_best };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct Decision {
  std::string bank;
  bool accepted = false;
  double evidence_before = 0.0;  // -inf for the unconditional first acceptance
  double evidence_after = 0.0;
};

struct EnsembleReport {
  std::vector<Decision> decisions;
  std::vector<std::string> selected;  // concatenation order
  lssvm::ClassifierModel final_model;
  Strategy strategy = Strategy::greedy;
  std::size_t models_trained = 0;
};

struct EnsembleOptions {
  evidence::OptimOptions optim;
  lssvm::TrainConfig train;
  int exhaustive_limit = 12;  // 2^M - 1 trainings
};

// Candidates are ordered by descending single-bank evidence; the best single
// bank is accepted unconditionally, then each next candidate is tentatively
// concatenated and kept only if the overall evidence strictly increases
// (relative tolerance 1e-6, so duplicates are rejected).
EnsembleReport greedy_ensemble(const CandidateSet& set, const EnsembleOptions& opts = {});

/// Trains every non-empty subset and returns the evidence argmax. Ties go to
/// the smaller subset, then lexicographic names.
EnsembleReport exhaustive_ensemble(const CandidateSet& set, const EnsembleOptions& opts = {});

/// Best single bank as a degenerate ensemble (strategy single_best).
EnsembleReport single_best(const CandidateSet& set, const EnsembleOptions& opts = {});

EnsembleReport run_ensemble(const CandidateSet& set, Strategy strategy,
                            const EnsembleOptions& opts = {});

struct CvReport {
  std::vector<double> grid;
  int folds = 0;
  Eigen::MatrixXd per_lambda_scores;  // grid x K mean validation score
  std::vector<double> chosen;         // per-class argmax lambda (first index on ties)
  std::uint64_t fold_assignment_seed = 0;
};

/// The lambda grid of the cross-validation baseline: {2^-10, ..., 2^10}.
std::vector<double> default_grid();

// k-fold grid search sharing one eigendecomposition per fold across all grid
// points and classes. Fold assignment: seeded shuffle, per-class round-robin
// dealing for single-label tasks, contiguous blocks otherwise. Single-label
// validation scores each lambda by overall argmax accuracy (every class gets
// the same chosen lambda: argmax mixes score scales across classes, so
// per-class regularizers cannot be validated independently). Multi-label
// scores each class by balanced accuracy at threshold 0.5 and picks per-class
// lambdas. A fold missing a class logs a warning; the class is scored on the
// remaining folds.
CvReport cv_grid_search(const FeatureBank& bank, const LabelMatrix& labels,
                        const std::vector<double>& grid, int folds, std::uint64_t seed,
                        TaskMode mode);

// UTF-8 JSON documents with deterministic layout; evidences rendered as
// decimal strings with 12 significant digits so diffs are reproducible.
std::string ensemble_report_json(const EnsembleReport& report);
std::string ranking_json(const std::vector<RankedBank>& ranking);
std::string ranking_trace_csv(const std::vector<RankedBank>& ranking);
std::string cv_report_json(const CvReport& report);

}  // namespace evsel::selection
