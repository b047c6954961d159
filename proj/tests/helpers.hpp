#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pcpred/matrix.hpp"
#include "pcpred/rng.hpp"

namespace pcpred::test {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Rows P1::a .. PN::a, columns C1 .. CM; NaN marks a missing cell.
inline PCMatrix make_matrix(const std::vector<std::vector<double>>& rows) {
  std::vector<RowKey> rk;
  std::vector<std::string> ck;
  std::vector<double> cells;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rk.push_back({"P" + std::to_string(r + 1), "a"});
    for (double v : rows[r]) cells.push_back(v);
  }
  for (std::size_t c = 0; c < rows.front().size(); ++c) ck.push_back("C" + std::to_string(c + 1));
  return PCMatrix(std::move(rk), std::move(ck), std::move(cells));
}

struct Planted {
  std::vector<double> row_weights;
  std::vector<double> col_weights;
  PCMatrix matrix;
};

/// Fully observed outer product of weights drawn uniformly from (lo, hi).
inline Planted planted_rank1(std::size_t n, std::size_t m, std::uint64_t seed, double lo = 0.5, double hi = 5.0) {
  Rng rng(seed);
  std::vector<double> rw(n), cw(m);
  for (auto& w : rw) w = rng.uniform(lo, hi);
  for (auto& w : cw) w = rng.uniform(lo, hi);
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) rows[i][j] = rw[i] * cw[j];
  return {rw, cw, make_matrix(rows)};
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace pcpred::test
