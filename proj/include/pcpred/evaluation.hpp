#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcpred/cliques.hpp"
#include "pcpred/exec.hpp"
#include "pcpred/factorization.hpp"
#include "pcpred/matrix.hpp"
#include "pcpred/ridge.hpp"

namespace pcpred {

enum class Algorithm { Ridge, Cliques, ALS, SVD, Ensemble };

std::string_view to_string(Algorithm a);
/// Accepts ridge, cliques, als, svd, ensemble (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

/// How the clique predictor treats cells it cannot estimate in-group.
enum class CliqueProtocol {
  Regression,              // ridge only
  InGroups,                // clique estimate only; other cells are uncovered
  InGroupsPlusRegression,  // clique estimate, ridge otherwise
};

std::string_view to_string(CliqueProtocol p);
CliqueProtocol parse_protocol(std::string_view name);

/// |predicted - target| / target.
double prediction_error(double predicted, double target);

struct EnsembleResult {
  double value = 0.0;
  std::size_t excluded = 0;
};

/// Mean of the components that produced a value. Throws when none did.
EnsembleResult ensemble_predict(std::span<const std::optional<double>> components);
double ensemble_predict(std::span<const double> components);

struct EvalConfig {
  RidgeConfig ridge;
  CliqueConfig cliques;
  ALSConfig als;
  std::size_t svd_rank = 1;
  std::size_t svd_max_outer = 100;
  std::vector<Algorithm> ensemble_members{Algorithm::Ridge, Algorithm::Cliques, Algorithm::ALS};
  Exec exec = Exec::Parallel;

  void validate() const;
};

struct CellPrediction {
  std::size_t row = 0;
  std::size_t col = 0;
  double predicted = 0.0;
  double target = 0.0;
  double error = 0.0;
  Algorithm algorithm = Algorithm::Ridge;
  std::size_t repeat = 0;
  /// Ensemble members that could not predict this cell.
  std::vector<Algorithm> excluded;
};

struct UncoveredCell {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t repeat = 0;
  std::string reason;
};

struct AlgorithmResult {
  Algorithm algorithm = Algorithm::Ridge;
  std::vector<CellPrediction> cells;
  std::vector<UncoveredCell> uncovered;
  /// Mean of cells[].error; NaN when no cell was predicted.
  double total_error = 0.0;

  void finalize();
};

struct GroupStats {
  std::size_t groups = 0;
  std::size_t singletons = 0;
};

struct EvalReport {
  std::string dataset;
  std::string protocol;  // "leave-one-out", "masking" or "outliers"
  double mask_fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::optional<CliqueProtocol> clique_protocol;
  std::optional<GroupStats> groups;
  std::vector<AlgorithmResult> results;
  std::vector<std::string> warnings;
  bool skipped = false;

  const AlgorithmResult* find(Algorithm a) const;
};

/// Result of asking one algorithm for one cell.
struct Outcome {
  std::optional<double> value;
  std::string reason;  // set when value is empty
  std::vector<Algorithm> excluded;
  /// Which method produced the value (cliques may fall back to ridge).
  std::optional<Algorithm> source;
};

/// Fits the requested algorithms once on a training matrix and answers per-cell
/// queries against it. Cliques use the in-groups-plus-regression rule.
class Completer {
 public:
  Completer(PCMatrix train, std::span<const Algorithm> algorithms, EvalConfig cfg);

  Outcome predict(Algorithm a, std::size_t row, std::size_t col) const;

  const PCMatrix& train() const { return train_; }
  const std::optional<Grouping>& grouping() const { return grouping_; }
  const std::optional<FactorModel>& als_model() const { return als_; }
  const std::optional<FactorModel>& svd_model() const { return svd_; }

 private:
  Outcome predict_single(Algorithm a, std::size_t row, std::size_t col) const;

  PCMatrix train_;
  EvalConfig cfg_;
  std::optional<Grouping> grouping_;
  std::optional<FactorModel> als_;
  std::optional<FactorModel> svd_;
};

/// Removes each present cell in turn, predicts it from the rest and scores it.
/// For cliques the similarity edges of the held-out column are recomputed
/// without the cell, so the held-out value never informs its own prediction.
/// `clique_protocol` applies to the Cliques algorithm (and the Cliques member
/// of an ensemble).
EvalReport leave_one_out(const PCMatrix& m, Algorithm algorithm, const EvalConfig& cfg,
                         CliqueProtocol clique_protocol = CliqueProtocol::InGroupsPlusRegression,
                         std::string dataset = "");

struct SweepSpec {
  std::vector<double> fractions;  // each in [0, 1)
  std::vector<Algorithm> algorithms;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::string dataset;
};

/// One report per fraction; each repeat masks with its own derived seed and
/// every algorithm is scored on the same held-out cells.
std::vector<EvalReport> masking_sweep(const PCMatrix& m, const SweepSpec& spec, const EvalConfig& cfg);

struct OutlierSpec {
  double fraction = 0.10;
  double lo = 0.0;
  double hi = 4.0;
};

/// Like masking_sweep, but after holding cells out the remaining training
/// cells are corrupted with inject_outliers. Errors are measured against the
/// clean held-out values.
std::vector<EvalReport> outlier_sweep(const PCMatrix& m, const OutlierSpec& outliers, const SweepSpec& spec,
                                      const EvalConfig& cfg);

}  // namespace pcpred
