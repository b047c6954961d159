#include "pcpred/cliques.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pcpred/error.hpp"

namespace pcpred {

void CliqueConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("clique threshold must be in (0, 1]");
  if (min_overlap < 2) throw Error("clique min_overlap must be >= 2");
}

std::optional<double> pearson(const PCMatrix& m, std::size_t col_a, std::size_t col_b,
                              std::size_t min_overlap) {
  std::size_t n = 0;
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!m.present(r, col_a) || !m.present(r, col_b)) continue;
    ++n;
    sum_a += m.raw(r, col_a);
    sum_b += m.raw(r, col_b);
  }
  if (n < min_overlap || n < 2) return std::nullopt;
  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!m.present(r, col_a) || !m.present(r, col_b)) continue;
    const double da = m.raw(r, col_a) - mean_a;
    const double db = m.raw(r, col_b) - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

SimilarityGraph::SimilarityGraph(std::size_t vertices, CliqueConfig cfg)
    : n_(vertices), cfg_(cfg), adj_(vertices * vertices, 0), degree_(vertices, 0) {}

std::size_t SimilarityGraph::edge_count() const {
  return std::accumulate(degree_.begin(), degree_.end(), std::size_t{0}) / 2;
}

void SimilarityGraph::set_edge(std::size_t a, std::size_t b, bool on) {
  if (a == b) return;
  const std::uint8_t v = on ? 1 : 0;
  if (adj_[a * n_ + b] == v) return;
  adj_[a * n_ + b] = v;
  adj_[b * n_ + a] = v;
  if (on) {
    ++degree_[a];
    ++degree_[b];
  } else {
    --degree_[a];
    --degree_[b];
  }
}

namespace {

bool is_edge(const PCMatrix& m, std::size_t a, std::size_t b, const CliqueConfig& cfg) {
  const auto r = pearson(m, a, b, cfg.min_overlap);
  return r && std::abs(*r) > cfg.threshold;
}

}  // namespace

SimilarityGraph build_graph_serial(const PCMatrix& m, const CliqueConfig& cfg) {
  cfg.validate();
  SimilarityGraph g(m.cols(), cfg);
  for (std::size_t a = 0; a < m.cols(); ++a)
    for (std::size_t b = a + 1; b < m.cols(); ++b)
      if (is_edge(m, a, b, cfg)) g.set_edge(a, b, true);
  return g;
}

SimilarityGraph build_graph(const PCMatrix& m, const CliqueConfig& cfg, Exec exec) {
  if (exec == Exec::Serial) return build_graph_serial(m, cfg);
  cfg.validate();
  const std::size_t n = m.cols();
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<std::uint8_t> hit(pairs, 0);
  // Flattened upper triangle: pair p -> (a, b), a < b, row-major.
  std::vector<std::size_t> row_start(n + 1, 0);
  for (std::size_t a = 0; a < n; ++a) row_start[a + 1] = row_start[a] + (n - a - 1);

  const auto count = static_cast<std::ptrdiff_t>(pairs);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    const auto up = static_cast<std::size_t>(p);
    const std::size_t a = static_cast<std::size_t>(
        std::upper_bound(row_start.begin(), row_start.end(), up) - row_start.begin() - 1);
    const std::size_t b = a + 1 + (up - row_start[a]);
    hit[up] = is_edge(m, a, b, cfg) ? 1 : 0;
  }

  SimilarityGraph g(n, cfg);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (hit[row_start[a] + (b - a - 1)]) g.set_edge(a, b, true);
  return g;
}

SimilarityGraph rebuild_column(const SimilarityGraph& g, const PCMatrix& m, std::size_t col) {
  if (g.vertices() != m.cols() || col >= m.cols()) throw Error("graph does not match matrix");
  SimilarityGraph out = g;
  for (std::size_t other = 0; other < m.cols(); ++other)
    if (other != col) out.set_edge(col, other, is_edge(m, col, other, g.config()));
  return out;
}

std::size_t Grouping::singleton_count() const {
  return static_cast<std::size_t>(
      std::count_if(cliques.begin(), cliques.end(), [](const auto& c) { return c.size() == 1; }));
}

bool Grouping::in_group(std::size_t v) const {
  if (v >= membership.size()) return false;
  for (std::size_t idx : membership[v])
    if (cliques[idx].size() >= 2) return true;
  return false;
}

namespace {

std::vector<std::size_t> grow_clique(const SimilarityGraph& g, std::size_t seed) {
  std::vector<std::size_t> clique{seed};
  std::vector<std::size_t> candidates;
  for (std::size_t u = 0; u < g.vertices(); ++u)
    if (g.adjacent(seed, u)) candidates.push_back(u);

  while (!candidates.empty()) {
    // Candidates stay in index order, so the first maximum wins ties.
    std::size_t best = candidates.front();
    for (std::size_t u : candidates)
      if (g.degree(u) > g.degree(best)) best = u;
    clique.push_back(best);
    std::erase_if(candidates, [&](std::size_t u) { return u == best || !g.adjacent(best, u); });
  }
  std::sort(clique.begin(), clique.end());
  return clique;
}

std::vector<std::size_t> visit_order(const SimilarityGraph& g) {
  std::vector<std::size_t> order(g.vertices());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.degree(a) > g.degree(b); });
  return order;
}

}  // namespace

Grouping find_cliques(const SimilarityGraph& g) {
  Grouping out;
  out.membership.resize(g.vertices());
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t v : visit_order(g)) {
    auto clique = grow_clique(g, v);
    if (!seen.insert(clique).second) continue;
    const std::size_t idx = out.cliques.size();
    for (std::size_t u : clique) out.membership[u].push_back(idx);
    out.cliques.push_back(std::move(clique));
  }
  return out;
}

std::vector<std::vector<std::size_t>> cliques_containing(const SimilarityGraph& g, std::size_t v) {
  if (v >= g.vertices()) throw Error("vertex out of range");
  std::vector<std::vector<std::size_t>> out;
  std::set<std::vector<std::size_t>> seen;
  // Same visiting order as find_cliques, so the output order matches its
  // filtered result. Only v and its neighbours can start a clique holding v.
  for (std::size_t s : visit_order(g)) {
    if (s != v && !g.adjacent(s, v)) continue;
    auto clique = grow_clique(g, s);
    if (!std::binary_search(clique.begin(), clique.end(), v)) continue;
    if (seen.insert(clique).second) out.push_back(std::move(clique));
  }
  return out;
}

double scaling_coefficient(const PCMatrix& m, std::size_t from_col, std::size_t to_col) {
  double sxy = 0.0, sxx = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!m.present(r, from_col) || !m.present(r, to_col)) continue;
    const double x = m.raw(r, from_col);
    sxy += x * m.raw(r, to_col);
    sxx += x * x;
    ++n;
  }
  if (n == 0) throw Error("scaling coefficient needs at least one co-observed row");
  return sxy / sxx;
}

std::optional<double> clique_estimate(const PCMatrix& m, std::span<const std::vector<std::size_t>> cliques,
                                      std::size_t row, std::size_t col) {
  std::vector<std::size_t> mates;
  for (const auto& clique : cliques)
    for (std::size_t u : clique)
      if (u != col) mates.push_back(u);
  std::sort(mates.begin(), mates.end());
  mates.erase(std::unique(mates.begin(), mates.end()), mates.end());

  const PCMatrix* train = &m;
  std::optional<PCMatrix> without;
  if (m.present(row, col)) {
    without = m.without_cell(row, col);
    train = &*without;
  }

  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t mate : mates) {
    if (!train->present(row, mate)) continue;
    double sxy = 0.0, sxx = 0.0;
    std::size_t overlap = 0;
    for (std::size_t r = 0; r < train->rows(); ++r) {
      if (!train->present(r, mate) || !train->present(r, col)) continue;
      const double x = train->raw(r, mate);
      sxy += x * train->raw(r, col);
      sxx += x * x;
      ++overlap;
    }
    if (overlap == 0) continue;
    sum += train->raw(row, mate) * (sxy / sxx);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return std::max(sum / static_cast<double>(used), kTimeFloor);
}

double clique_predict(const PCMatrix& m, const Grouping& grouping, std::size_t row, std::size_t col,
                      const RidgeConfig& ridge_cfg) {
  if (row >= m.rows() || col >= m.cols() || col >= grouping.membership.size())
    throw Error("cell index out of range");
  bool cold = true;
  for (std::size_t c = 0; c < m.cols() && cold; ++c) cold = (c == col) || !m.present(row, c);
  if (cold) throw ColdRowError("cold row: no observed time for '" + m.row_keys()[row].label() + "'");

  std::vector<std::vector<std::size_t>> own;
  for (std::size_t idx : grouping.membership[col])
    if (grouping.cliques[idx].size() >= 2) own.push_back(grouping.cliques[idx]);
  if (auto est = clique_estimate(m, own, row, col)) return *est;
  return ridge_predict(m, row, col, ridge_cfg);
}

}  // namespace pcpred
