#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pcpred/exec.hpp"
#include "pcpred/matrix.hpp"

namespace pcpred {

struct ALSConfig {
  std::size_t k = 1;
  double lambda = 1e-2;
  std::size_t max_iters = 200;
  /// Stop once |rmse_prev - rmse| <= tol * rmse_prev.
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rank-K embeddings: time(i, j) ~ row_factors.row(i) . col_factors.col(j).
struct FactorModel {
  std::size_t k = 0;
  Eigen::MatrixXd row_factors;  // N x K, one program embedding per row
  Eigen::MatrixXd col_factors;  // K x M, one machine embedding per column
  std::vector<double> train_rmse_history;
  std::vector<RowKey> row_keys;
  std::vector<std::string> col_keys;
};

/// Alternating ridge solves over present cells until the training RMSE
/// settles. Each latent dimension is sign-normalized so its machine factors
/// have a positive mean. Throws Error("unfactorable matrix") if some row or
/// column has no present cell.
FactorModel als_fit(const PCMatrix& m, const ALSConfig& cfg, Exec exec = Exec::Parallel);

/// Inner product, floored at kTimeFloor.
double predict(const FactorModel& model, std::size_t row, std::size_t col);

/// Machines by ascending K=1 embedding (fastest first), ties by id.
std::vector<std::string> rank_machines(const FactorModel& model);

/// Iterative impute-and-truncate: missing cells start at the row mean, then
/// take the rank-K truncated SVD and refill the missing cells from it,
/// `max_outer` times. Deterministic; `seed` is accepted for interface parity.
FactorModel svd_fit(const PCMatrix& m, std::size_t k, std::size_t max_outer, std::uint64_t seed = 0);

/// Flips latent dimensions whose machine factors have negative mean.
void normalize_signs(FactorModel& model);

}  // namespace pcpred
