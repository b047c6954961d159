#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcpred {

/// One execution record: a program run with one argument set on one machine.
struct Observation {
  std::string program_id;
  std::string arg_label;
  std::string machine_id;
  double seconds = 0.0;
};

/// Identifies one matrix row: a (program, argument set) pair.
struct RowKey {
  std::string program;
  std::string args;

  /// "program::args", the form used in matrix CSV files and reports.
  std::string label() const { return program + "::" + args; }
  static RowKey parse(const std::string& label);

  auto operator<=>(const RowKey&) const = default;
};

/// Sentinel for a missing cell. Never a valid time (times are > 0).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Programs x machines table of execution times with explicit missing cells.
///
/// Value type: operations that change cells return a new matrix.
class PCMatrix {
 public:
  /// All cells missing.
  PCMatrix(std::vector<RowKey> row_keys, std::vector<std::string> col_keys);
  /// Row-major cells; kMissing (NaN) marks an empty cell. Present cells must
  /// be finite and > 0, keys must be unique and non-empty in both dimensions.
  PCMatrix(std::vector<RowKey> row_keys, std::vector<std::string> col_keys,
           std::vector<double> cells);

  std::size_t rows() const { return row_keys_.size(); }
  std::size_t cols() const { return col_keys_.size(); }
  const std::vector<RowKey>& row_keys() const { return row_keys_; }
  const std::vector<std::string>& col_keys() const { return col_keys_; }

  bool present(std::size_t r, std::size_t c) const;
  std::optional<double> at(std::size_t r, std::size_t c) const;
  /// Raw cell; NaN when missing.
  double raw(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  std::span<const double> cells() const { return cells_; }

  std::size_t count_present() const;
  std::size_t present_in_row(std::size_t r) const;
  std::size_t present_in_col(std::size_t c) const;

  std::optional<std::size_t> find_row(const RowKey& key) const;
  std::optional<std::size_t> find_col(const std::string& id) const;

  PCMatrix with_cell(std::size_t r, std::size_t c, double seconds) const;
  PCMatrix without_cell(std::size_t r, std::size_t c) const;

  bool operator==(const PCMatrix& other) const;

 private:
  void check_index(std::size_t r, std::size_t c) const;

  std::vector<RowKey> row_keys_;
  std::vector<std::string> col_keys_;
  std::vector<double> cells_;
};

struct BuildSummary {
  std::size_t observations = 0;
  /// Cells that received more than one observation and were averaged.
  std::size_t duplicate_cells = 0;
};

/// Rows sorted by (program, args); columns in order of first appearance.
/// Duplicate observations of one cell are averaged.
PCMatrix build_matrix(std::span<const Observation> observations);
PCMatrix build_matrix(std::span<const Observation> observations, BuildSummary& summary);

/// Fraction of present cells, in (0, 1].
double density(const PCMatrix& m);

struct MaskSpec {
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

struct HeldOutCell {
  std::size_t row = 0;
  std::size_t col = 0;
  double seconds = 0.0;

  bool operator==(const HeldOutCell&) const = default;
};

struct MaskResult {
  PCMatrix masked;
  std::vector<HeldOutCell> heldout;
};

/// Removes round(fraction * present) cells uniformly at random, never
/// emptying a row or a column. Throws Error("mask infeasible") when that
/// count cannot be reached.
MaskResult mask_random(const PCMatrix& m, const MaskSpec& spec);

/// Puts held-out cells back.
PCMatrix restore(const PCMatrix& masked, std::span<const HeldOutCell> heldout);

/// Multiplies round(fraction * present) random present cells by independent
/// uniform draws from (lo, hi). Missingness pattern is unchanged.
PCMatrix inject_outliers(const PCMatrix& m, double fraction, double lo, double hi,
                         std::uint64_t seed);

}  // namespace pcpred
