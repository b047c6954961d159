#pragma once

#include <cstddef>

#include "pcpred/matrix.hpp"

namespace pcpred {

struct RidgeConfig {
  /// Penalty on standardized feature weights. The intercept is not penalized.
  double lambda = 1e-2;
  /// Fewer co-observed training rows than this and the feature set shrinks.
  std::size_t min_training_rows = 3;

  void validate() const;
};

/// Lower bound applied to every predicted time.
inline constexpr double kTimeFloor = 1e-9;

/// Predicts cell (row, col) from the same row's times on the other machines.
///
/// A linear model with intercept is fit over the other rows that observed
/// `col` and every feature column. Features are the row's present columns,
/// ordered by how many rows co-observe them with `col`; the longest prefix that
/// still leaves `min_training_rows` training rows is used. With no usable
/// feature the result is the mean of `col`'s other present values.
///
/// Any value stored at (row, col) is ignored. Throws ColdRowError when the row
/// has no other present cell and Error("no basis for prediction") when `col`
/// has no other present cell.
double ridge_predict(const PCMatrix& m, std::size_t row, std::size_t col, const RidgeConfig& cfg = {});

}  // namespace pcpred
