#pragma once

#include <iosfwd>
#include <span>

#include <json.hpp>

#include "pcpred/application.hpp"
#include "pcpred/cliques.hpp"
#include "pcpred/config.hpp"
#include "pcpred/evaluation.hpp"
#include "pcpred/factorization.hpp"

namespace pcpred {

nlohmann::ordered_json config_json(const RunConfig& cfg);

/// {"threshold", "min_overlap", "cliques": [[machine ids...], ...]}
nlohmann::ordered_json grouping_json(const Grouping& g, const CliqueConfig& cfg, const PCMatrix& m);

/// K, per-row and per-machine factor vectors, RMSE history and an optional
/// config echo. model_from_json reads the same layout back.
nlohmann::ordered_json model_json(const FactorModel& model, const nlohmann::ordered_json& config = {});
FactorModel model_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_json(const EvalReport& report, const PCMatrix& m);

/// Flat `fraction,algorithm,total_error,n_cells,n_uncovered` table.
void write_reports_csv(std::ostream& out, std::span<const EvalReport> reports);

nlohmann::ordered_json placement_json(const PlacementDecision& d);

}  // namespace pcpred
