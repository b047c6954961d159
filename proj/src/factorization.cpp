#include "pcpred/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcpred/error.hpp"
#include "pcpred/ridge.hpp"
#include "pcpred/rng.hpp"

namespace pcpred {

void ALSConfig::validate() const {
  if (k == 0) throw Error("ALS rank K must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("ALS lambda must be >= 0");
  if (max_iters == 0) throw Error("ALS max_iters must be positive");
  if (!(tol > 0.0)) throw Error("ALS tol must be positive");
}

namespace {

struct Pattern {
  std::vector<std::vector<std::size_t>> by_row;  // present columns per row
  std::vector<std::vector<std::size_t>> by_col;  // present rows per column
};

Pattern observed_pattern(const PCMatrix& m) {
  Pattern p{std::vector<std::vector<std::size_t>>(m.rows()), std::vector<std::vector<std::size_t>>(m.cols())};
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.present(r, c)) {
        p.by_row[r].push_back(c);
        p.by_col[c].push_back(r);
      }
  for (const auto& v : p.by_row)
    if (v.empty()) throw Error("unfactorable matrix: a row has no observed time");
  for (const auto& v : p.by_col)
    if (v.empty()) throw Error("unfactorable matrix: a column has no observed time");
  return p;
}

Eigen::VectorXd solve_spd(Eigen::MatrixXd a, const Eigen::VectorXd& b, double lambda) {
  a.diagonal().array() += lambda;
  if (lambda > 0.0) return a.ldlt().solve(b);
  return a.completeOrthogonalDecomposition().solve(b);
}

// One half-step: refit every row of `target` (one embedding per row) against
// the fixed embeddings in `fixed` (one per row as well).
template <class Value>
void half_step(Eigen::MatrixXd& target, const Eigen::MatrixXd& fixed,
               const std::vector<std::vector<std::size_t>>& observed, Value value, double lambda,
               Exec exec) {
  const auto k = target.cols();
  for_each_index(exec, observed.size(), [&](std::size_t i) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (std::size_t j : observed[i]) {
      const auto f = fixed.row(static_cast<Eigen::Index>(j));
      gram.noalias() += f.transpose() * f;
      rhs.noalias() += value(i, j) * f.transpose();
    }
    target.row(static_cast<Eigen::Index>(i)) = solve_spd(std::move(gram), rhs, lambda).transpose();
  });
}

double train_rmse(const PCMatrix& m, const Pattern& p, const Eigen::MatrixXd& rows,
                  const Eigen::MatrixXd& cols_t) {
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < p.by_row.size(); ++r)
    for (std::size_t c : p.by_row[r]) {
      const double e = m.raw(r, c) -
                       rows.row(static_cast<Eigen::Index>(r)).dot(cols_t.row(static_cast<Eigen::Index>(c)));
      sse += e * e;
      ++n;
    }
  return std::sqrt(sse / static_cast<double>(n));
}

}  // namespace

void normalize_signs(FactorModel& model) {
  for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(model.k); ++d) {
    if (model.col_factors.row(d).mean() < 0.0) {
      model.col_factors.row(d) *= -1.0;
      model.row_factors.col(d) *= -1.0;
    }
  }
}

FactorModel als_fit(const PCMatrix& m, const ALSConfig& cfg, Exec exec) {
  cfg.validate();
  const Pattern pattern = observed_pattern(m);
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto mcols = static_cast<Eigen::Index>(m.cols());
  const auto k = static_cast<Eigen::Index>(cfg.k);

  double mean = 0.0;
  std::size_t present = 0;
  for (double v : m.cells())
    if (!std::isnan(v)) {
      mean += v;
      ++present;
    }
  mean /= static_cast<double>(present);
  const double scale = std::sqrt(mean / static_cast<double>(cfg.k));

  Rng rng(cfg.seed);
  Eigen::MatrixXd rows(n, k);
  Eigen::MatrixXd cols_t(mcols, k);  // machine embeddings stored one per row while fitting
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < k; ++d) rows(i, d) = rng.uniform(0.5, 1.5) * scale;
  for (Eigen::Index j = 0; j < mcols; ++j)
    for (Eigen::Index d = 0; d < k; ++d) cols_t(j, d) = rng.uniform(0.5, 1.5) * scale;

  FactorModel model;
  model.k = cfg.k;
  double previous = 0.0;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    half_step(rows, cols_t, pattern.by_row, [&](std::size_t r, std::size_t c) { return m.raw(r, c); },
              cfg.lambda, exec);
    half_step(cols_t, rows, pattern.by_col, [&](std::size_t c, std::size_t r) { return m.raw(r, c); },
              cfg.lambda, exec);
    const double rmse = train_rmse(m, pattern, rows, cols_t);
    model.train_rmse_history.push_back(rmse);
    if (rmse == 0.0) break;
    if (it > 0 && std::abs(previous - rmse) <= cfg.tol * previous) break;
    previous = rmse;
  }

  model.row_factors = std::move(rows);
  model.col_factors = cols_t.transpose();
  model.row_keys = m.row_keys();
  model.col_keys = m.col_keys();
  normalize_signs(model);
  return model;
}

double predict(const FactorModel& model, std::size_t row, std::size_t col) {
  if (row >= static_cast<std::size_t>(model.row_factors.rows()) ||
      col >= static_cast<std::size_t>(model.col_factors.cols()))
    throw Error("model index out of range");
  const double v = model.row_factors.row(static_cast<Eigen::Index>(row))
                       .dot(model.col_factors.col(static_cast<Eigen::Index>(col)));
  return std::max(v, kTimeFloor);
}

std::vector<std::string> rank_machines(const FactorModel& model) {
  if (model.k != 1) throw Error("ordering defined only for K=1");
  const auto m = static_cast<std::size_t>(model.col_factors.cols());
  if (model.col_keys.size() != m) throw Error("model has no machine ids");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ea = model.col_factors(0, static_cast<Eigen::Index>(a));
    const double eb = model.col_factors(0, static_cast<Eigen::Index>(b));
    if (ea != eb) return ea < eb;
    return model.col_keys[a] < model.col_keys[b];
  });
  std::vector<std::string> out;
  out.reserve(m);
  for (std::size_t j : order) out.push_back(model.col_keys[j]);
  return out;
}

FactorModel svd_fit(const PCMatrix& m, std::size_t k, std::size_t max_outer, std::uint64_t /*seed*/) {
  const Pattern pattern = observed_pattern(m);
  if (k == 0 || k > std::min(m.rows(), m.cols())) throw Error("SVD rank K must be in [1, min(N, M)]");
  if (max_outer == 0) throw Error("SVD max_outer must be positive");
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto mc = static_cast<Eigen::Index>(m.cols());
  const auto kk = static_cast<Eigen::Index>(k);

  Eigen::MatrixXd filled(n, mc);
  for (Eigen::Index r = 0; r < n; ++r) {
    double row_mean = 0.0;
    for (std::size_t c : pattern.by_row[static_cast<std::size_t>(r)]) row_mean += m.raw(static_cast<std::size_t>(r), c);
    row_mean /= static_cast<double>(pattern.by_row[static_cast<std::size_t>(r)].size());
    for (Eigen::Index c = 0; c < mc; ++c) {
      const double v = m.raw(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      filled(r, c) = std::isnan(v) ? row_mean : v;
    }
  }

  FactorModel model;
  model.k = k;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(filled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd root = svd.singularValues().head(kk).cwiseSqrt();
    model.row_factors = svd.matrixU().leftCols(kk) * root.asDiagonal();
    model.col_factors = root.asDiagonal() * svd.matrixV().leftCols(kk).transpose();
    const Eigen::MatrixXd recon = model.row_factors * model.col_factors;

    double sse = 0.0;
    std::size_t present = 0;
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < mc; ++c) {
        if (m.present(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) {
          const double e = filled(r, c) - recon(r, c);
          sse += e * e;
          ++present;
        } else {
          filled(r, c) = recon(r, c);
        }
      }
    model.train_rmse_history.push_back(std::sqrt(sse / static_cast<double>(present)));
  }
  model.row_keys = m.row_keys();
  model.col_keys = m.col_keys();
  normalize_signs(model);
  return model;
}

}  // namespace pcpred
