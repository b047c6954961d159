#include "pcpred/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>

#include "pcpred/csv.hpp"
#include "pcpred/error.hpp"
#include "pcpred/rng.hpp"

namespace pcpred {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ridge: return "ridge";
    case Algorithm::Cliques: return "cliques";
    case Algorithm::ALS: return "als";
    case Algorithm::SVD: return "svd";
    case Algorithm::Ensemble: return "ensemble";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  const std::string n = lower(name);
  if (n == "ridge" || n == "regression") return Algorithm::Ridge;
  if (n == "cliques") return Algorithm::Cliques;
  if (n == "als") return Algorithm::ALS;
  if (n == "svd") return Algorithm::SVD;
  if (n == "ensemble") return Algorithm::Ensemble;
  throw Error("unknown algorithm '" + std::string(name) + "' (expected ridge, cliques, als, svd or ensemble)");
}

std::string_view to_string(CliqueProtocol p) {
  switch (p) {
    case CliqueProtocol::Regression: return "regression";
    case CliqueProtocol::InGroups: return "in-groups";
    case CliqueProtocol::InGroupsPlusRegression: return "in-groups+regression";
  }
  return "?";
}

CliqueProtocol parse_protocol(std::string_view name) {
  const std::string n = lower(name);
  if (n == "regression") return CliqueProtocol::Regression;
  if (n == "in-groups" || n == "ingroups") return CliqueProtocol::InGroups;
  if (n == "in-groups+regression" || n == "ingroups+regression") return CliqueProtocol::InGroupsPlusRegression;
  throw Error("unknown protocol '" + std::string(name) +
              "' (expected regression, in-groups or in-groups+regression)");
}

double prediction_error(double predicted, double target) {
  if (!(target > 0.0)) throw Error("target time must be positive");
  return std::abs(predicted - target) / target;
}

namespace {

// Mean taken as an offset from the first value, so equal inputs come back bit-exact.
double offset_mean(std::span<const double> values) {
  const double base = values.front();
  double spread = 0.0;
  for (double v : values) spread += v - base;
  return base + spread / static_cast<double>(values.size());
}

}  // namespace

EnsembleResult ensemble_predict(std::span<const std::optional<double>> components) {
  if (components.empty()) throw Error("ensemble needs at least one component");
  std::vector<double> used;
  for (const auto& c : components)
    if (c) used.push_back(*c);
  if (used.empty()) throw Error("all ensemble members failed");
  return {offset_mean(used), components.size() - used.size()};
}

double ensemble_predict(std::span<const double> components) {
  if (components.empty()) throw Error("ensemble needs at least one component");
  return offset_mean(components);
}

void EvalConfig::validate() const {
  ridge.validate();
  cliques.validate();
  als.validate();
  if (svd_rank == 0) throw Error("svd rank must be positive");
  if (svd_max_outer == 0) throw Error("svd max_outer must be positive");
  if (ensemble_members.empty()) throw Error("ensemble needs at least one member");
  for (auto a : ensemble_members)
    if (a == Algorithm::Ensemble) throw Error("ensemble cannot contain itself");
}

void AlgorithmResult::finalize() {
  if (cells.empty()) {
    total_error = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (const auto& c : cells) sum += c.error;
  total_error = sum / static_cast<double>(cells.size());
}

const AlgorithmResult* EvalReport::find(Algorithm a) const {
  for (const auto& r : results)
    if (r.algorithm == a) return &r;
  return nullptr;
}

namespace {

bool row_is_cold(const PCMatrix& m, std::size_t row, std::size_t col) {
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (c != col && m.present(row, c)) return false;
  return true;
}

Outcome failed(std::string reason) { return Outcome{std::nullopt, std::move(reason), {}, std::nullopt}; }

template <class Fn>
Outcome guarded(Fn&& fn) {
  try {
    return Outcome{fn(), {}, {}, std::nullopt};
  } catch (const ColdRowError&) {
    return failed("cold row");
  } catch (const Error& e) {
    return failed(e.what());
  }
}

std::vector<Algorithm> expand(std::span<const Algorithm> algorithms, const EvalConfig& cfg) {
  std::vector<Algorithm> out;
  for (auto a : algorithms) {
    if (a == Algorithm::Ensemble)
      out.insert(out.end(), cfg.ensemble_members.begin(), cfg.ensemble_members.end());
    else
      out.push_back(a);
  }
  return out;
}

bool contains(std::span<const Algorithm> v, Algorithm a) { return std::find(v.begin(), v.end(), a) != v.end(); }

Outcome combine(std::span<const Algorithm> members, std::span<const Outcome> parts) {
  std::vector<std::optional<double>> values;
  Outcome out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    values.push_back(parts[i].value);
    if (!parts[i].value) out.excluded.push_back(members[i]);
  }
  if (out.excluded.size() == members.size()) {
    out.reason = "all ensemble members failed";
    return out;
  }
  out.value = ensemble_predict(values).value;
  out.source = Algorithm::Ensemble;
  return out;
}

}  // namespace

Completer::Completer(PCMatrix train, std::span<const Algorithm> algorithms, EvalConfig cfg)
    : train_(std::move(train)), cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto needed = expand(algorithms, cfg_);
  // Fit failures (e.g. an empty row) are reported per cell, not thrown here.
  if (contains(needed, Algorithm::Cliques)) grouping_ = find_cliques(build_graph(train_, cfg_.cliques, cfg_.exec));
  try {
    if (contains(needed, Algorithm::ALS)) als_ = als_fit(train_, cfg_.als, cfg_.exec);
  } catch (const Error&) {
  }
  try {
    if (contains(needed, Algorithm::SVD))
      svd_ = svd_fit(train_, std::min({cfg_.svd_rank, train_.rows(), train_.cols()}), cfg_.svd_max_outer,
                     cfg_.als.seed);
  } catch (const Error&) {
  }
}

Outcome Completer::predict_single(Algorithm a, std::size_t row, std::size_t col) const {
  Outcome out;
  switch (a) {
    case Algorithm::Ridge:
      out = guarded([&] { return ridge_predict(train_, row, col, cfg_.ridge); });
      break;
    case Algorithm::Cliques: {
      if (!grouping_) return failed("cliques not fitted");
      if (row_is_cold(train_, row, col)) return failed("cold row");
      std::vector<std::vector<std::size_t>> own;
      for (std::size_t idx : grouping_->membership[col])
        if (grouping_->cliques[idx].size() >= 2) own.push_back(grouping_->cliques[idx]);
      if (auto est = clique_estimate(train_, own, row, col)) return Outcome{est, {}, {}, Algorithm::Cliques};
      out = guarded([&] { return ridge_predict(train_, row, col, cfg_.ridge); });
      if (out.value) out.source = Algorithm::Ridge;
      return out;
    }
    case Algorithm::ALS:
      if (!als_) return failed("unfactorable matrix");
      out = guarded([&] { return pcpred::predict(*als_, row, col); });
      break;
    case Algorithm::SVD:
      if (!svd_) return failed("unfactorable matrix");
      out = guarded([&] { return pcpred::predict(*svd_, row, col); });
      break;
    case Algorithm::Ensemble:
      return failed("ensemble is not a single algorithm");
  }
  if (out.value) out.source = a;
  return out;
}

Outcome Completer::predict(Algorithm a, std::size_t row, std::size_t col) const {
  if (row >= train_.rows() || col >= train_.cols()) throw Error("cell index out of range");
  if (a != Algorithm::Ensemble) return predict_single(a, row, col);
  std::vector<Outcome> parts;
  for (auto member : cfg_.ensemble_members) parts.push_back(predict_single(member, row, col));
  return combine(cfg_.ensemble_members, parts);
}

namespace {

struct LooContext {
  const EvalConfig& cfg;
  CliqueProtocol protocol;
  const SimilarityGraph* full_graph;
};

Outcome loo_cliques(const LooContext& ctx, const PCMatrix& train, std::size_t row, std::size_t col) {
  if (row_is_cold(train, row, col)) return failed("cold row");
  if (ctx.protocol == CliqueProtocol::Regression)
    return guarded([&] { return ridge_predict(train, row, col, ctx.cfg.ridge); });

  const SimilarityGraph g = rebuild_column(*ctx.full_graph, train, col);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& c : cliques_containing(g, col))
    if (c.size() >= 2) groups.push_back(std::move(c));
  std::optional<double> est;
  if (!groups.empty()) est = clique_estimate(train, groups, row, col);
  if (est) return Outcome{est, {}, {}, Algorithm::Cliques};
  if (ctx.protocol == CliqueProtocol::InGroups)
    return failed(groups.empty() ? "machine is not in a group" : "no clique-mate observed in this row");
  return guarded([&] { return ridge_predict(train, row, col, ctx.cfg.ridge); });
}

Outcome loo_single(const LooContext& ctx, Algorithm a, const PCMatrix& train, std::size_t row, std::size_t col) {
  switch (a) {
    case Algorithm::Ridge:
      return guarded([&] { return ridge_predict(train, row, col, ctx.cfg.ridge); });
    case Algorithm::Cliques:
      return loo_cliques(ctx, train, row, col);
    case Algorithm::ALS:
      return guarded([&] { return predict(als_fit(train, ctx.cfg.als, Exec::Serial), row, col); });
    case Algorithm::SVD:
      return guarded([&] {
        const std::size_t k = std::min({ctx.cfg.svd_rank, train.rows(), train.cols()});
        return predict(svd_fit(train, k, ctx.cfg.svd_max_outer, ctx.cfg.als.seed), row, col);
      });
    case Algorithm::Ensemble:
      break;
  }
  return failed("ensemble is not a single algorithm");
}

void record(AlgorithmResult& result, const Outcome& o, std::size_t row, std::size_t col, double target,
            std::size_t repeat) {
  if (o.value) {
    result.cells.push_back(
        {row, col, *o.value, target, prediction_error(*o.value, target), result.algorithm, repeat, o.excluded});
  } else {
    result.uncovered.push_back({row, col, repeat, o.reason});
  }
}

}  // namespace

EvalReport leave_one_out(const PCMatrix& m, Algorithm algorithm, const EvalConfig& cfg,
                         CliqueProtocol clique_protocol, std::string dataset) {
  cfg.validate();
  EvalReport report;
  report.dataset = std::move(dataset);
  report.protocol = "leave-one-out";
  report.repeats = 1;
  report.seed = cfg.als.seed;

  const std::vector<Algorithm> requested{algorithm};
  const auto needed = expand(requested, cfg);
  std::optional<SimilarityGraph> full_graph;
  if (contains(needed, Algorithm::Cliques)) {
    report.clique_protocol = clique_protocol;
    full_graph = build_graph(m, cfg.cliques, cfg.exec);
    const Grouping grouping = find_cliques(*full_graph);
    report.groups = GroupStats{grouping.cliques.size(), grouping.singleton_count()};
  }
  const LooContext ctx{cfg, clique_protocol, full_graph ? &*full_graph : nullptr};

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.present(r, c)) cells.emplace_back(r, c);

  std::vector<Outcome> outcomes(cells.size());
  for_each_index(cfg.exec, cells.size(), [&](std::size_t i) {
    const auto [r, c] = cells[i];
    const PCMatrix train = m.without_cell(r, c);
    if (algorithm != Algorithm::Ensemble) {
      outcomes[i] = loo_single(ctx, algorithm, train, r, c);
      return;
    }
    std::vector<Outcome> parts;
    for (auto member : cfg.ensemble_members) parts.push_back(loo_single(ctx, member, train, r, c));
    outcomes[i] = combine(cfg.ensemble_members, parts);
  });

  AlgorithmResult result;
  result.algorithm = algorithm;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [r, c] = cells[i];
    record(result, outcomes[i], r, c, m.raw(r, c), 0);
  }
  result.finalize();
  report.results.push_back(std::move(result));
  if (cells.empty()) report.warnings.push_back("no held-out cells");
  return report;
}

namespace {

std::vector<EvalReport> run_sweep(const PCMatrix& m, const SweepSpec& spec, const EvalConfig& cfg,
                                  const OutlierSpec* outliers) {
  cfg.validate();
  if (spec.algorithms.empty()) throw Error("sweep needs at least one algorithm");
  if (spec.repeats == 0) throw Error("sweep repeats must be positive");

  std::vector<EvalReport> reports;
  for (double fraction : spec.fractions) {
    EvalReport report;
    report.dataset = spec.dataset;
    report.protocol = outliers ? "outliers" : "masking";
    report.mask_fraction = fraction;
    report.seed = spec.seed;
    report.repeats = spec.repeats;
    if (contains(spec.algorithms, Algorithm::Cliques) ||
        (contains(spec.algorithms, Algorithm::Ensemble) && contains(cfg.ensemble_members, Algorithm::Cliques)))
      report.clique_protocol = CliqueProtocol::InGroupsPlusRegression;
    for (auto a : spec.algorithms) report.results.push_back(AlgorithmResult{a, {}, {}, 0.0});

    for (std::size_t rep = 0; rep < spec.repeats && !report.skipped; ++rep) {
      const std::uint64_t mask_seed = derive_seed(spec.seed, std::bit_cast<std::uint64_t>(fraction), rep);
      std::optional<MaskResult> masked;
      try {
        masked = mask_random(m, MaskSpec{fraction, mask_seed});
      } catch (const Error& e) {
        report.skipped = true;
        report.warnings.push_back("fraction " + format_double(fraction) + ": " + e.what() + "; point skipped");
        break;
      }
      PCMatrix train = masked->masked;
      if (outliers)
        train = inject_outliers(train, outliers->fraction, outliers->lo, outliers->hi,
                                derive_seed(mask_seed, 0x6f75746c69657273ULL));

      const Completer completer(std::move(train), spec.algorithms, cfg);
      const auto& heldout = masked->heldout;
      std::vector<std::vector<Outcome>> outcomes(heldout.size());
      for_each_index(cfg.exec, heldout.size(), [&](std::size_t i) {
        for (auto a : spec.algorithms) outcomes[i].push_back(completer.predict(a, heldout[i].row, heldout[i].col));
      });
      for (std::size_t i = 0; i < heldout.size(); ++i)
        for (std::size_t k = 0; k < spec.algorithms.size(); ++k)
          record(report.results[k], outcomes[i][k], heldout[i].row, heldout[i].col, heldout[i].seconds, rep);
    }
    if (report.skipped) {
      for (auto& r : report.results) {
        r.cells.clear();
        r.uncovered.clear();
      }
    }
    for (auto& r : report.results) r.finalize();
    if (!report.skipped && report.results.front().cells.empty() && report.results.front().uncovered.empty())
      report.warnings.push_back("no held-out cells");
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace

std::vector<EvalReport> masking_sweep(const PCMatrix& m, const SweepSpec& spec, const EvalConfig& cfg) {
  return run_sweep(m, spec, cfg, nullptr);
}

std::vector<EvalReport> outlier_sweep(const PCMatrix& m, const OutlierSpec& outliers, const SweepSpec& spec,
                                      const EvalConfig& cfg) {
  if (!(outliers.fraction >= 0.0 && outliers.fraction <= 1.0)) throw Error("outlier fraction must be in [0, 1]");
  if (!(outliers.lo >= 0.0 && outliers.lo < outliers.hi)) throw Error("invalid outlier interval");
  return run_sweep(m, spec, cfg, &outliers);
}

}  // namespace pcpred
