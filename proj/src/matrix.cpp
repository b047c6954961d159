#include "pcpred/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "pcpred/error.hpp"
#include "pcpred/rng.hpp"

namespace pcpred {

RowKey RowKey::parse(const std::string& label) {
  const auto pos = label.find("::");
  if (pos == std::string::npos) return RowKey{label, ""};
  return RowKey{label.substr(0, pos), label.substr(pos + 2)};
}

PCMatrix::PCMatrix(std::vector<RowKey> row_keys, std::vector<std::string> col_keys)
    : PCMatrix(std::move(row_keys), std::move(col_keys), {}) {}

PCMatrix::PCMatrix(std::vector<RowKey> row_keys, std::vector<std::string> col_keys,
                   std::vector<double> cells)
    : row_keys_(std::move(row_keys)), col_keys_(std::move(col_keys)), cells_(std::move(cells)) {
  if (row_keys_.empty() || col_keys_.empty()) throw Error("matrix needs at least one row and one column");
  if (cells_.empty()) cells_.assign(row_keys_.size() * col_keys_.size(), kMissing);
  if (cells_.size() != row_keys_.size() * col_keys_.size())
    throw Error("cell count does not match matrix shape");

  std::set<RowKey> seen_rows;
  for (const auto& k : row_keys_) {
    if (k.program.empty()) throw Error("empty program id in row key");
    if (!seen_rows.insert(k).second) throw Error("duplicate row key '" + k.label() + "'");
  }
  std::set<std::string> seen_cols;
  for (const auto& k : col_keys_) {
    if (k.empty()) throw Error("empty machine id");
    if (!seen_cols.insert(k).second) throw Error("duplicate machine id '" + k + "'");
  }
  for (double v : cells_) {
    if (std::isnan(v)) continue;
    if (!std::isfinite(v) || v <= 0.0) throw Error("matrix cell must be a positive finite time");
  }
}

void PCMatrix::check_index(std::size_t r, std::size_t c) const {
  if (r >= rows() || c >= cols()) throw Error("cell index out of range");
}

bool PCMatrix::present(std::size_t r, std::size_t c) const { return !std::isnan(raw(r, c)); }

std::optional<double> PCMatrix::at(std::size_t r, std::size_t c) const {
  check_index(r, c);
  if (!present(r, c)) return std::nullopt;
  return raw(r, c);
}

std::size_t PCMatrix::count_present() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](double v) { return !std::isnan(v); }));
}

std::size_t PCMatrix::present_in_row(std::size_t r) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols(); ++c) n += present(r, c) ? 1 : 0;
  return n;
}

std::size_t PCMatrix::present_in_col(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows(); ++r) n += present(r, c) ? 1 : 0;
  return n;
}

std::optional<std::size_t> PCMatrix::find_row(const RowKey& key) const {
  auto it = std::find(row_keys_.begin(), row_keys_.end(), key);
  if (it == row_keys_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_keys_.begin());
}

std::optional<std::size_t> PCMatrix::find_col(const std::string& id) const {
  auto it = std::find(col_keys_.begin(), col_keys_.end(), id);
  if (it == col_keys_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - col_keys_.begin());
}

PCMatrix PCMatrix::with_cell(std::size_t r, std::size_t c, double seconds) const {
  check_index(r, c);
  if (!std::isfinite(seconds) || seconds <= 0.0) throw Error("time must be positive and finite");
  PCMatrix out = *this;
  out.cells_[r * cols() + c] = seconds;
  return out;
}

PCMatrix PCMatrix::without_cell(std::size_t r, std::size_t c) const {
  check_index(r, c);
  PCMatrix out = *this;
  out.cells_[r * cols() + c] = kMissing;
  return out;
}

bool PCMatrix::operator==(const PCMatrix& other) const {
  if (row_keys_ != other.row_keys_ || col_keys_ != other.col_keys_) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const bool a = std::isnan(cells_[i]);
    const bool b = std::isnan(other.cells_[i]);
    if (a != b) return false;
    if (!a && cells_[i] != other.cells_[i]) return false;
  }
  return true;
}

PCMatrix build_matrix(std::span<const Observation> observations) {
  BuildSummary ignored;
  return build_matrix(observations, ignored);
}

PCMatrix build_matrix(std::span<const Observation> observations, BuildSummary& summary) {
  if (observations.empty()) throw Error("no observations");

  std::vector<std::string> machines;
  std::unordered_map<std::string, std::size_t> machine_index;
  std::map<RowKey, std::size_t> row_slot;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    if (o.program_id.empty() || o.arg_label.empty() || o.machine_id.empty())
      throw Error("observation " + std::to_string(i + 1) + " has an empty id");
    if (!(o.seconds > 0.0) || !std::isfinite(o.seconds))
      throw Error("observation " + std::to_string(i + 1) + " (" + o.program_id + ", " + o.arg_label +
                  ", " + o.machine_id + ") has non-positive time");
    if (machine_index.emplace(o.machine_id, machines.size()).second) machines.push_back(o.machine_id);
    row_slot.emplace(RowKey{o.program_id, o.arg_label}, 0);
  }

  std::vector<RowKey> rows;
  rows.reserve(row_slot.size());
  for (auto& [key, slot] : row_slot) {
    slot = rows.size();
    rows.push_back(key);
  }

  // Values are sorted before summing so the mean does not depend on input order.
  std::vector<std::vector<double>> samples(rows.size() * machines.size());
  for (const auto& o : observations) {
    const std::size_t r = row_slot.at(RowKey{o.program_id, o.arg_label});
    const std::size_t c = machine_index.at(o.machine_id);
    samples[r * machines.size() + c].push_back(o.seconds);
  }

  std::vector<double> cells(samples.size(), kMissing);
  summary = BuildSummary{observations.size(), 0};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& s = samples[i];
    if (s.empty()) continue;
    if (s.size() > 1) ++summary.duplicate_cells;
    std::sort(s.begin(), s.end());
    cells[i] = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  }
  return PCMatrix(std::move(rows), std::move(machines), std::move(cells));
}

double density(const PCMatrix& m) {
  return static_cast<double>(m.count_present()) / static_cast<double>(m.rows() * m.cols());
}

namespace {

std::vector<std::size_t> present_indices(const PCMatrix& m) {
  std::vector<std::size_t> idx;
  const auto cells = m.cells();
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!std::isnan(cells[i])) idx.push_back(i);
  return idx;
}

std::size_t scaled_count(double fraction, std::size_t present) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(present)));
}

}  // namespace

MaskResult mask_random(const PCMatrix& m, const MaskSpec& spec) {
  if (!(spec.fraction >= 0.0 && spec.fraction < 1.0)) throw Error("mask fraction must be in [0, 1)");

  auto order = present_indices(m);
  const std::size_t target = scaled_count(spec.fraction, order.size());
  if (target == 0) return MaskResult{m, {}};
  // Every row and column keeps a cell, so at least max(N, M) must remain.
  if (order.size() < target + std::max(m.rows(), m.cols())) throw Error("mask infeasible");

  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> row_left(m.rows()), col_left(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) row_left[r] = m.present_in_row(r);
  for (std::size_t c = 0; c < m.cols(); ++c) col_left[c] = m.present_in_col(c);

  // Walk the shuffled cells and skip any pick that would empty its row or
  // column. Counts only decrease, so a skipped cell can never become valid
  // later and a single pass is equivalent to re-drawing.
  std::vector<double> cells(m.cells().begin(), m.cells().end());
  std::vector<HeldOutCell> heldout;
  heldout.reserve(target);
  for (std::size_t flat : order) {
    if (heldout.size() == target) break;
    const std::size_t r = flat / m.cols();
    const std::size_t c = flat % m.cols();
    if (row_left[r] <= 1 || col_left[c] <= 1) continue;
    --row_left[r];
    --col_left[c];
    heldout.push_back({r, c, cells[flat]});
    cells[flat] = kMissing;
  }
  if (heldout.size() != target) throw Error("mask infeasible");

  std::sort(heldout.begin(), heldout.end(), [](const HeldOutCell& a, const HeldOutCell& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  return MaskResult{PCMatrix(m.row_keys(), m.col_keys(), std::move(cells)), std::move(heldout)};
}

PCMatrix restore(const PCMatrix& masked, std::span<const HeldOutCell> heldout) {
  std::vector<double> cells(masked.cells().begin(), masked.cells().end());
  for (const auto& h : heldout) {
    if (h.row >= masked.rows() || h.col >= masked.cols()) throw Error("held-out cell out of range");
    cells[h.row * masked.cols() + h.col] = h.seconds;
  }
  return PCMatrix(masked.row_keys(), masked.col_keys(), std::move(cells));
}

PCMatrix inject_outliers(const PCMatrix& m, double fraction, double lo, double hi,
                         std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("outlier fraction must be in [0, 1]");
  if (!(lo >= 0.0 && lo < hi) || !std::isfinite(hi)) throw Error("invalid outlier interval");

  auto order = present_indices(m);
  const std::size_t count = scaled_count(fraction, order.size());
  if (count == 0) return m;

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<double> cells(m.cells().begin(), m.cells().end());
  for (std::size_t k = 0; k < count; ++k) {
    const double original = cells[order[k]];
    double scaled = 0.0;
    do {
      scaled = original * rng.uniform(lo, hi);
    } while (!(scaled > 0.0) || !std::isfinite(scaled));
    cells[order[k]] = scaled;
  }
  return PCMatrix(m.row_keys(), m.col_keys(), std::move(cells));
}

}  // namespace pcpred
