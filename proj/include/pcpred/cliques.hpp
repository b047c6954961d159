#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pcpred/exec.hpp"
#include "pcpred/matrix.hpp"
#include "pcpred/ridge.hpp"

namespace pcpred {

struct CliqueConfig {
  /// Edge iff |r| > threshold.
  double threshold = 0.97;
  /// Co-observed rows needed before r is defined.
  std::size_t min_overlap = 3;

  void validate() const;
  bool operator==(const CliqueConfig&) const = default;
};

/// Pearson r over rows where both columns are present. nullopt when the
/// overlap is below `min_overlap` or either restricted column is constant.
std::optional<double> pearson(const PCMatrix& m, std::size_t col_a, std::size_t col_b,
                              std::size_t min_overlap);

/// Machine similarity graph: vertices are matrix columns.
class SimilarityGraph {
 public:
  SimilarityGraph(std::size_t vertices, CliqueConfig cfg);

  std::size_t vertices() const { return n_; }
  const CliqueConfig& config() const { return cfg_; }
  bool adjacent(std::size_t a, std::size_t b) const { return adj_[a * n_ + b] != 0; }
  std::size_t degree(std::size_t v) const { return degree_[v]; }
  std::size_t edge_count() const;

  void set_edge(std::size_t a, std::size_t b, bool on);

  bool operator==(const SimilarityGraph&) const = default;

 private:
  std::size_t n_;
  CliqueConfig cfg_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::size_t> degree_;
};

/// Tests all M(M-1)/2 column pairs. The parallel path spreads the flattened
/// pair index over OpenMP threads.
SimilarityGraph build_graph(const PCMatrix& m, const CliqueConfig& cfg, Exec exec = Exec::Parallel);

/// Plain nested-loop construction, kept as the reference for build_graph.
SimilarityGraph build_graph_serial(const PCMatrix& m, const CliqueConfig& cfg);

/// Copy of `g` with every edge touching `col` recomputed against `m`. Used when
/// one cell of `col` changes and all other pairs are unaffected.
SimilarityGraph rebuild_column(const SimilarityGraph& g, const PCMatrix& m, std::size_t col);

struct Grouping {
  /// Each clique is a sorted list of vertices.
  std::vector<std::vector<std::size_t>> cliques;
  /// vertex -> indices into `cliques`.
  std::vector<std::vector<std::size_t>> membership;

  std::size_t singleton_count() const;
  /// True when `v` belongs to some clique of size >= 2.
  bool in_group(std::size_t v) const;
};

/// Greedy clique cover, O(M^3) worst case. Vertices are visited by descending
/// degree (ties by index); each grows a clique by repeatedly adding the
/// highest-degree vertex adjacent to all current members (ties by index).
/// Identical cliques are reported once. Every vertex lands in at least one
/// clique, but the set is not an enumeration of maximal cliques.
Grouping find_cliques(const SimilarityGraph& g);

/// The cliques find_cliques would report that contain `v`, computed by
/// growing only from `v` and its neighbours.
std::vector<std::vector<std::size_t>> cliques_containing(const SimilarityGraph& g, std::size_t v);

/// Least-squares slope through the origin mapping `from_col` onto `to_col`
/// over co-observed rows: sum(x*y) / sum(x*x). Throws if nothing overlaps.
double scaling_coefficient(const PCMatrix& m, std::size_t from_col, std::size_t to_col);

/// Mean of value(row, mate) * scaling(mate -> col) over every clique-mate of
/// `col` with a value in `row` and at least one co-observed row. nullopt when
/// no mate qualifies. The cell (row, col) itself is ignored.
std::optional<double> clique_estimate(const PCMatrix& m, std::span<const std::vector<std::size_t>> cliques,
                                      std::size_t row, std::size_t col);

/// Clique estimate with ridge fallback. Throws ColdRowError if the row has no
/// present cell other than (row, col).
double clique_predict(const PCMatrix& m, const Grouping& grouping, std::size_t row, std::size_t col,
                      const RidgeConfig& ridge_cfg = {});

}  // namespace pcpred
