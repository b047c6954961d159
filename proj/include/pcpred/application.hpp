#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcpred/matrix.hpp"

namespace pcpred {

enum class PlacementRationale { MinPredicted, ColdRowRankedFastest };

std::string_view to_string(PlacementRationale r);

struct PlacementDecision {
  RowKey program;
  std::string machine;
  /// Empty for cold rows, which are placed by ranking alone.
  std::optional<double> predicted_seconds;
  PlacementRationale rationale = PlacementRationale::MinPredicted;
};

/// Machine with the smallest time in `row` (ties: smallest id). A row with no
/// times at all goes to the first machine of `ranking`. A partially filled row
/// is an error: complete the matrix first.
PlacementDecision greedy_place(const PCMatrix& completed, std::size_t row,
                               std::optional<std::span<const std::string>> ranking = std::nullopt);

struct Schedule {
  /// machine id -> rows in the order they were assigned
  std::map<std::string, std::vector<std::size_t>> assignment;
  std::map<std::string, double> load;
  double makespan = 0.0;
};

/// List scheduling on unrelated machines: rows in descending order of their
/// fastest time (ties by row index), each placed on the machine that finishes
/// it earliest given current load (ties: smallest id).
Schedule schedule_batch(const PCMatrix& completed, std::span<const std::size_t> rows);

}  // namespace pcpred
