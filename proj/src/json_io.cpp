#include "pcpred/json_io.hpp"

#include <cmath>
#include <ostream>

#include "pcpred/csv.hpp"
#include "pcpred/error.hpp"

namespace pcpred {

using nlohmann::ordered_json;

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

ordered_json grouping_json(const Grouping& g, const CliqueConfig& cfg, const PCMatrix& m) {
  ordered_json j;
  j["threshold"] = cfg.threshold;
  j["min_overlap"] = cfg.min_overlap;
  j["groups"] = g.cliques.size();
  j["singletons"] = g.singleton_count();
  ordered_json cliques = ordered_json::array();
  for (const auto& clique : g.cliques) {
    ordered_json ids = ordered_json::array();
    for (std::size_t v : clique) ids.push_back(m.col_keys().at(v));
    cliques.push_back(std::move(ids));
  }
  j["cliques"] = std::move(cliques);
  return j;
}

ordered_json model_json(const FactorModel& model, const ordered_json& config) {
  ordered_json j;
  j["k"] = model.k;
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < model.row_factors.rows(); ++i) {
    ordered_json f = ordered_json::array();
    for (Eigen::Index d = 0; d < model.row_factors.cols(); ++d) f.push_back(model.row_factors(i, d));
    ordered_json r;
    r["key"] = static_cast<std::size_t>(i) < model.row_keys.size() ? model.row_keys[static_cast<std::size_t>(i)].label()
                                                                   : std::to_string(i);
    r["factors"] = std::move(f);
    rows.push_back(std::move(r));
  }
  ordered_json machines = ordered_json::array();
  for (Eigen::Index c = 0; c < model.col_factors.cols(); ++c) {
    ordered_json f = ordered_json::array();
    for (Eigen::Index d = 0; d < model.col_factors.rows(); ++d) f.push_back(model.col_factors(d, c));
    ordered_json r;
    r["id"] = static_cast<std::size_t>(c) < model.col_keys.size() ? model.col_keys[static_cast<std::size_t>(c)]
                                                                   : std::to_string(c);
    r["factors"] = std::move(f);
    machines.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["machines"] = std::move(machines);
  j["train_rmse_history"] = model.train_rmse_history;
  if (!config.is_null()) j["config"] = config;
  return j;
}

FactorModel model_from_json(const nlohmann::json& j) {
  try {
    FactorModel model;
    model.k = j.at("k").get<std::size_t>();
    if (model.k == 0) throw Error("model K must be positive");
    const auto& rows = j.at("rows");
    const auto& machines = j.at("machines");
    const auto k = static_cast<Eigen::Index>(model.k);
    model.row_factors.resize(static_cast<Eigen::Index>(rows.size()), k);
    model.col_factors.resize(k, static_cast<Eigen::Index>(machines.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      model.row_keys.push_back(RowKey::parse(rows[i].at("key").get<std::string>()));
      const auto& f = rows[i].at("factors");
      if (f.size() != model.k) throw Error("row factor length does not match K");
      for (std::size_t d = 0; d < model.k; ++d)
        model.row_factors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = f[d].get<double>();
    }
    for (std::size_t c = 0; c < machines.size(); ++c) {
      model.col_keys.push_back(machines[c].at("id").get<std::string>());
      const auto& f = machines[c].at("factors");
      if (f.size() != model.k) throw Error("machine factor length does not match K");
      for (std::size_t d = 0; d < model.k; ++d)
        model.col_factors(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) = f[d].get<double>();
    }
    if (j.contains("train_rmse_history")) model.train_rmse_history = j["train_rmse_history"].get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
}

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

ordered_json report_json(const EvalReport& report, const PCMatrix& m) {
  ordered_json j;
  j["dataset"] = report.dataset;
  j["protocol"] = report.protocol;
  j["mask_fraction"] = report.mask_fraction;
  j["seed"] = report.seed;
  j["repeats"] = report.repeats;
  if (report.clique_protocol) j["clique_protocol"] = std::string(to_string(*report.clique_protocol));
  if (report.groups) {
    j["groups"] = report.groups->groups;
    j["singleton_groups"] = report.groups->singletons;
  }
  j["skipped"] = report.skipped;
  j["warnings"] = report.warnings;
  ordered_json results = ordered_json::array();
  for (const auto& r : report.results) {
    ordered_json a;
    a["algorithm"] = std::string(to_string(r.algorithm));
    a["total_error"] = number_or_null(r.total_error);
    a["n_cells"] = r.cells.size();
    a["n_uncovered"] = r.uncovered.size();
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) {
      ordered_json cj;
      cj["row"] = c.row;
      cj["col"] = c.col;
      cj["program"] = m.row_keys().at(c.row).label();
      cj["machine"] = m.col_keys().at(c.col);
      cj["repeat"] = c.repeat;
      cj["predicted"] = c.predicted;
      cj["target"] = c.target;
      cj["error"] = c.error;
      if (!c.excluded.empty()) {
        ordered_json ex = ordered_json::array();
        for (auto e : c.excluded) ex.push_back(std::string(to_string(e)));
        cj["excluded"] = std::move(ex);
      }
      cells.push_back(std::move(cj));
    }
    a["cells"] = std::move(cells);
    ordered_json uncovered = ordered_json::array();
    for (const auto& u : r.uncovered) {
      ordered_json uj;
      uj["row"] = u.row;
      uj["col"] = u.col;
      uj["repeat"] = u.repeat;
      uj["reason"] = u.reason;
      uncovered.push_back(std::move(uj));
    }
    a["uncovered"] = std::move(uncovered);
    results.push_back(std::move(a));
  }
  j["results"] = std::move(results);
  return j;
}

void write_reports_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "fraction,algorithm,total_error,n_cells,n_uncovered\n";
  for (const auto& report : reports) {
    if (report.skipped) continue;
    for (const auto& r : report.results) {
      out << format_double(report.mask_fraction) << ',' << to_string(r.algorithm) << ','
          << (std::isfinite(r.total_error) ? format_double(r.total_error) : std::string()) << ','
          << r.cells.size() << ',' << r.uncovered.size() << '\n';
    }
  }
}

ordered_json placement_json(const PlacementDecision& d) {
  ordered_json j;
  j["program"] = d.program.label();
  j["machine"] = d.machine;
  j["predicted_seconds"] = d.predicted_seconds ? ordered_json(*d.predicted_seconds) : ordered_json(nullptr);
  j["rationale"] = std::string(to_string(d.rationale));
  return j;
}

}  // namespace pcpred
