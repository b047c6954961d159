#include "pcpred/ridge.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "pcpred/error.hpp"

namespace pcpred {

void RidgeConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("ridge lambda must be >= 0");
  if (min_training_rows < 2) throw Error("ridge min_training_rows must be >= 2");
}

namespace {

// Standardized ridge fit; returns the prediction at `query`.
double fit_and_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& query,
                       double lambda) {
  const auto n = x.rows();
  const auto k = x.cols();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd z = x.rowwise() - mean;
  Eigen::RowVectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n));
    // A constant feature carries no information; zeroing it keeps the system sane.
    scale(j) = sd > 0.0 ? 1.0 / sd : 0.0;
  }
  z = z.array().rowwise() * scale.array();
  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::VectorXd w;
  if (k <= n) {
    Eigen::MatrixXd gram = z.transpose() * z;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd rhs = z.transpose() * yc;
    w = lambda > 0.0 ? Eigen::VectorXd(gram.ldlt().solve(rhs))
                     : Eigen::VectorXd(gram.completeOrthogonalDecomposition().solve(rhs));
  } else {
    // More features than rows: solve the n x n dual system instead.
    Eigen::MatrixXd kernel = z * z.transpose();
    kernel.diagonal().array() += lambda;
    const Eigen::VectorXd alpha = lambda > 0.0
                                      ? Eigen::VectorXd(kernel.ldlt().solve(yc))
                                      : Eigen::VectorXd(kernel.completeOrthogonalDecomposition().solve(yc));
    w = z.transpose() * alpha;
  }
  const Eigen::VectorXd zq = ((query.transpose() - mean).array() * scale.array()).transpose();
  return y_mean + zq.dot(w);
}

}  // namespace

double ridge_predict(const PCMatrix& m, std::size_t row, std::size_t col, const RidgeConfig& cfg) {
  cfg.validate();
  if (row >= m.rows() || col >= m.cols()) throw Error("cell index out of range");

  std::vector<std::size_t> training;  // other rows with a value in `col`
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (r != row && m.present(r, col)) training.push_back(r);
  if (training.empty()) throw Error("no basis for prediction");

  struct Feature {
    std::size_t col;
    std::size_t co_observed;
  };
  std::vector<Feature> features;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c == col || !m.present(row, c)) continue;
    std::size_t n = 0;
    for (std::size_t r : training) n += m.present(r, c) ? 1 : 0;
    features.push_back({c, n});
  }
  if (features.empty()) throw ColdRowError("cold row: no observed time to regress from");

  std::stable_sort(features.begin(), features.end(), [](const Feature& a, const Feature& b) {
    return a.co_observed > b.co_observed;
  });

  // Dropping the least co-observed feature until trainable is the same as
  // keeping the longest trainable prefix: row sets shrink as features are added.
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> rows_kept = training;
  for (const auto& f : features) {
    std::vector<std::size_t> next;
    for (std::size_t r : rows_kept)
      if (m.present(r, f.col)) next.push_back(r);
    if (next.size() < cfg.min_training_rows) break;
    chosen.push_back(f.col);
    rows_kept = std::move(next);
  }

  double prediction = 0.0;
  if (chosen.empty()) {
    for (std::size_t r : training) prediction += m.raw(r, col);
    prediction /= static_cast<double>(training.size());
  } else {
    std::sort(chosen.begin(), chosen.end());
    const auto n = static_cast<Eigen::Index>(rows_kept.size());
    const auto k = static_cast<Eigen::Index>(chosen.size());
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    Eigen::VectorXd query(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t r = rows_kept[static_cast<std::size_t>(i)];
      y(i) = m.raw(r, col);
      for (Eigen::Index j = 0; j < k; ++j) x(i, j) = m.raw(r, chosen[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < k; ++j) query(j) = m.raw(row, chosen[static_cast<std::size_t>(j)]);
    prediction = fit_and_predict(x, y, query, cfg.lambda);
  }
  if (!std::isfinite(prediction)) throw Error("ridge produced a non-finite prediction");
  return std::max(prediction, kTimeFloor);
}

}  // namespace pcpred
