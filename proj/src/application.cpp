#include "pcpred/application.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "pcpred/error.hpp"

namespace pcpred {

std::string_view to_string(PlacementRationale r) {
  return r == PlacementRationale::MinPredicted ? "MinPredicted" : "ColdRowRankedFastest";
}

PlacementDecision greedy_place(const PCMatrix& completed, std::size_t row,
                               std::optional<std::span<const std::string>> ranking) {
  if (row >= completed.rows()) throw Error("row index out of range");
  const std::size_t present = completed.present_in_row(row);
  const RowKey& key = completed.row_keys()[row];

  if (present == 0) {
    if (!ranking || ranking->empty())
      throw ColdRowError("cold row '" + key.label() + "' and no machine ranking supplied");
    const std::string& fastest = ranking->front();
    if (!completed.find_col(fastest)) throw Error("ranked machine '" + fastest + "' is not in the matrix");
    return {key, fastest, std::nullopt, PlacementRationale::ColdRowRankedFastest};
  }
  if (present != completed.cols())
    throw Error("row '" + key.label() + "' has missing cells; complete the matrix first");

  std::size_t best = 0;
  for (std::size_t c = 1; c < completed.cols(); ++c) {
    const double t = completed.raw(row, c);
    const double b = completed.raw(row, best);
    if (t < b || (t == b && completed.col_keys()[c] < completed.col_keys()[best])) best = c;
  }
  return {key, completed.col_keys()[best], completed.raw(row, best), PlacementRationale::MinPredicted};
}

Schedule schedule_batch(const PCMatrix& completed, std::span<const std::size_t> rows) {
  Schedule out;
  if (rows.empty()) return out;
  for (std::size_t r : rows) {
    if (r >= completed.rows()) throw Error("row index out of range");
    if (completed.present_in_row(r) != completed.cols())
      throw Error("row '" + completed.row_keys()[r].label() + "' is not fully predicted");
  }

  std::vector<double> fastest(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < completed.cols(); ++c) best = std::min(best, completed.raw(rows[i], c));
    fastest[i] = best;
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fastest[a] != fastest[b]) return fastest[a] > fastest[b];
    return rows[a] < rows[b];
  });

  std::vector<double> load(completed.cols(), 0.0);
  const auto& ids = completed.col_keys();
  for (std::size_t i : order) {
    const std::size_t r = rows[i];
    std::size_t best = 0;
    for (std::size_t c = 1; c < completed.cols(); ++c) {
      const double finish = load[c] + completed.raw(r, c);
      const double best_finish = load[best] + completed.raw(r, best);
      if (finish < best_finish || (finish == best_finish && ids[c] < ids[best])) best = c;
    }
    load[best] += completed.raw(r, best);
    out.assignment[ids[best]].push_back(r);
  }
  for (std::size_t c = 0; c < completed.cols(); ++c) {
    if (load[c] > 0.0) out.load[ids[c]] = load[c];
    out.makespan = std::max(out.makespan, load[c]);
  }
  return out;
}

}  // namespace pcpred
