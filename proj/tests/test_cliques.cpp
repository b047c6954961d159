#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pcpred/cliques.hpp"
#include "pcpred/error.hpp"

using namespace pcpred;
using pcpred::test::kNaN;
using pcpred::test::make_matrix;

namespace {

PCMatrix columns(const std::vector<std::vector<double>>& cols) {
  std::vector<std::vector<double>> rows(cols.front().size(), std::vector<double>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) rows[r][c] = cols[c][r];
  return make_matrix(rows);
}

// Textbook single-pass formula, independent of the library's centered sums.
double textbook_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

SimilarityGraph graph_from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  SimilarityGraph g(n, {});
  for (auto [a, b] : edges) g.set_edge(a, b, true);
  return g;
}

}  // namespace

TEST_CASE("pearson: exact relations") {
  const auto m = columns({{1, 2, 3}, {2, 4, 6}, {3, 2, 1}});
  CHECK(pearson(m, 0, 1, 3).value() == 1.0);
  CHECK(pearson(m, 0, 2, 3).value() == -1.0);
}

TEST_CASE("pearson: matches the textbook formula") {
  const std::vector<double> x{1, 2, 3, 4}, y{1.1, 1.9, 3.2, 3.8};
  const auto m = columns({x, y});
  const double oracle = textbook_r(x, y);
  CHECK(std::abs(oracle - 0.9908470001860922) < 1e-15);  // 18.8 / sqrt(360)
  CHECK(std::abs(pearson(m, 0, 1, 3).value() - oracle) < 1e-12);
}

TEST_CASE("pearson: undefined cases") {
  const auto m = columns({{1, kNaN, 3, 4}, {2, 4, kNaN, 8}, {5, 5, 5, 5}});
  CHECK_FALSE(pearson(m, 0, 1, 3).has_value());  // overlap 2
  CHECK(pearson(m, 0, 1, 2).has_value());
  CHECK_FALSE(pearson(m, 0, 2, 2).has_value());  // zero variance
}

TEST_CASE("pearson: symmetry and positive affine invariance") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.below(15);
    std::vector<double> x(n), y(n), z(n);
    const double alpha = rng.uniform(0.01, 100), beta = rng.uniform(0, 50);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(1, 10);
      y[i] = rng.uniform(1, 10);
      z[i] = alpha * x[i] + beta;
    }
    const auto m = columns({x, y, z});
    REQUIRE(pearson(m, 0, 1, 3) == pearson(m, 1, 0, 3));
    CHECK(std::abs(*pearson(m, 2, 1, 3) - *pearson(m, 0, 1, 3)) < 1e-12);
  }
}

TEST_CASE("build_graph: proportional columns give K3") {
  const auto m = columns({{1, 2, 3, 5}, {2, 4, 6, 10}, {0.5, 1, 1.5, 2.5}});
  const auto g = build_graph(m, {0.97, 3});
  CHECK(g.edge_count() == 3);
  CHECK(find_cliques(g).cliques == std::vector<std::vector<std::size_t>>{{0, 1, 2}});
}

TEST_CASE("build_graph: single-cell column is isolated") {
  const auto m = columns({{1, 2, 3, 5}, {2, 4, 6, 10}, {kNaN, kNaN, 7, kNaN}});
  const auto g = build_graph(m, {0.97, 3});
  CHECK(g.degree(2) == 0);
  CHECK(g.adjacent(0, 1));
}

TEST_CASE("build_graph: negative correlation counts") {
  const auto m = columns({{1, 2, 3, 4}, {8, 6, 4, 2}});
  CHECK(build_graph(m, {0.97, 3}).adjacent(0, 1));
}

TEST_CASE("find_cliques: edgeless graph") {
  const auto g = graph_from_edges(4, {});
  const auto grouping = find_cliques(g);
  CHECK(grouping.cliques.size() == 4);
  CHECK(grouping.singleton_count() == 4);
  for (std::size_t v = 0; v < 4; ++v) CHECK_FALSE(grouping.in_group(v));
}

TEST_CASE("find_cliques: path a-b-c") {
  // Visit order b (deg 2), a, c. From b the tie between a and c goes to a.
  const auto grouping = find_cliques(graph_from_edges(3, {{0, 1}, {1, 2}}));
  CHECK(grouping.cliques == std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}});
  CHECK(grouping.membership[1] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("find_cliques: cover and completeness on random graphs") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(25);
    const double p = rng.uniform(0.0, 1.0);
    SimilarityGraph g(n, {});
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (rng.uniform_open() < p) g.set_edge(a, b, true);
    const auto grouping = find_cliques(g);
    for (std::size_t v = 0; v < n; ++v) REQUIRE_FALSE(grouping.membership[v].empty());
    for (const auto& c : grouping.cliques)
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) REQUIRE(g.adjacent(c[i], c[j]));

    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::vector<std::size_t>> expected;
      for (std::size_t idx : grouping.membership[v]) expected.push_back(grouping.cliques[idx]);
      REQUIRE(cliques_containing(g, v) == expected);
    }
  }
}

TEST_CASE("rebuild_column matches a full rebuild") {
  Rng rng(43);
  auto m = test::planted_rank1(8, 10, 5).matrix;
  // Add noise so that some pairs fall below the threshold.
  std::vector<double> cells(m.cells().begin(), m.cells().end());
  for (auto& v : cells) v *= rng.uniform(0.9, 1.1);
  m = PCMatrix(m.row_keys(), m.col_keys(), cells);
  const CliqueConfig cfg{0.97, 3};
  const auto full = build_graph(m, cfg);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto without = m.without_cell(r, c);
      REQUIRE(rebuild_column(full, without, c) == build_graph(without, cfg));
    }
}

TEST_CASE("scaling_coefficient") {
  CHECK(scaling_coefficient(columns({{1, 2}, {2, 4}}), 0, 1) == 2.0);
  CHECK(scaling_coefficient(columns({{1, 1}, {3, 3}}), 0, 1) == 3.0);
  // sum(xy) / sum(x^2) = 28.5 / 14
  CHECK(std::abs(scaling_coefficient(columns({{1, 2, 3}, {2.1, 3.9, 6.2}}), 0, 1) - 28.5 / 14.0) < 1e-15);
  CHECK_THROWS_AS(scaling_coefficient(columns({{1, kNaN}, {kNaN, 3}}), 0, 1), Error);
}

TEST_CASE("scaling coefficients of proportional columns are reciprocal") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const double k = static_cast<double>(1 + rng.below(16)) / 4.0;  // exact binary fractions
    std::vector<double> x(6), y(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = static_cast<double>(1 + rng.below(64));
      y[i] = k * x[i];
    }
    const auto m = columns({x, y});
    CHECK(scaling_coefficient(m, 0, 1) * scaling_coefficient(m, 1, 0) == 1.0);
  }
}

TEST_CASE("clique_predict: single mate exact scaling") {
  const auto m = columns({{1, 2, 3, 7}, {2, 4, 6, kNaN}});
  const Grouping g = find_cliques(build_graph(m, {0.97, 3}));
  CHECK(std::abs(clique_predict(m, g, 3, 1) - 14.0) < 1e-9);
}

TEST_CASE("clique_predict: mean of two mates") {
  // Mate C1 scales by 1 (estimate 10), mate C3 by 1/2 (estimate 12).
  const auto m = columns({{1, 2, 3, 10}, {1, 2, 3, kNaN}, {2, 4, 6, 24}});
  Grouping g;
  g.cliques = {{0, 1, 2}};
  g.membership = {{0}, {0}, {0}};
  CHECK(std::abs(clique_predict(m, g, 3, 1) - 11.0) < 1e-12);
}

TEST_CASE("clique_predict: singleton machine falls back to ridge") {
  const auto m = columns({{1, 2, 3, 4, 7}, {2, 4, 6, 8, kNaN}});
  Grouping g;
  g.cliques = {{0}, {1}};
  g.membership = {{0}, {1}};
  const double want = ridge_predict(m, 4, 1);
  CHECK(clique_predict(m, g, 4, 1) == want);
}

TEST_CASE("clique_predict: cold row") {
  const auto m = columns({{1, 2, kNaN}, {2, 4, kNaN}});
  const Grouping g = find_cliques(build_graph(m, {0.97, 2}));
  CHECK_THROWS_AS(clique_predict(m, g, 2, 1), ColdRowError);
}

TEST_CASE("clique_predict reproduces held-out cells of exactly proportional columns") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto planted = test::planted_rank1(6 + rng.below(8), 3 + rng.below(6), rng.next());
    const auto& m = planted.matrix;
    const std::size_t r = rng.below(m.rows()), c = rng.below(m.cols());
    const auto train = m.without_cell(r, c);
    const Grouping g = find_cliques(build_graph(train, {0.97, 3}));
    CHECK(test::rel_err(clique_predict(train, g, r, c), m.raw(r, c)) < 1e-9);
  }
}
