#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pcpred/application.hpp"
#include "pcpred/config.hpp"
#include "pcpred/csv.hpp"
#include "pcpred/error.hpp"
#include "pcpred/evaluation.hpp"
#include "pcpred/json_io.hpp"

namespace pcpred::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;

  std::string input;
  std::string out;
  std::string model_path;
  std::string grouping_path;
  std::optional<std::string> algorithm;
  std::optional<std::string> protocol;
  std::optional<std::string> fractions;
  std::optional<std::string> algorithms;
  std::optional<std::size_t> repeats;
  std::optional<double> outlier_percent;
  std::optional<std::string> interval;
  std::string programs;
  bool schedule = false;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg.load_file(o.config_path);
  for (const auto& s : o.overrides) cfg.apply_override(s);
  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.algorithm) cfg.set("algorithm", *o.algorithm);
  if (o.protocol) cfg.set("protocol", *o.protocol);
  if (o.fractions) cfg.set("fractions", *o.fractions);
  if (o.algorithms) cfg.set("algorithms", *o.algorithms);
  if (o.repeats) cfg.repeats = *o.repeats;
  if (o.outlier_percent) cfg.outlier_percent = *o.outlier_percent;
  if (o.interval) {
    const auto parts = split_list(*o.interval);
    if (parts.size() != 2) throw Error("--interval expects lo,hi");
    cfg.set("outlier.lo", parts[0]);
    cfg.set("outlier.hi", parts[1]);
  }
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

ordered_json provenance(const RunConfig& cfg, const std::string& command, const std::string& input) {
  ordered_json j;
  j["command"] = command;
  j["input"] = input;
  j["config"] = config_json(cfg);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

std::string dataset_name(const std::string& path) { return fs::path(path).stem().string(); }

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const auto observations = read_observations(fs::path(o.input));
  BuildSummary summary;
  const PCMatrix m = build_matrix(observations, summary);
  if (summary.duplicate_cells > 0)
    err << "warning: " << summary.duplicate_cells << " cell(s) had duplicate observations; averaged\n";
  write_matrix_csv(fs::path(o.out), m);
  out << "matrix " << m.rows() << "x" << m.cols() << ", density " << format_double(density(m)) << " -> " << o.out
      << '\n';
  return 0;
}

int cmd_complete(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const Algorithm algorithm = parse_algorithm(cfg.algorithm);
  const EvalConfig eval = cfg.eval_config();
  const PCMatrix m = read_matrix_csv(fs::path(o.input));

  for (std::size_t c = 0; c < m.cols(); ++c)
    if (m.present_in_col(c) == 0) throw Error("machine '" + m.col_keys()[c] + "' has no observed time");

  // Cold rows cannot be completed cell by cell; fit on the rest and leave them empty.
  std::vector<std::size_t> warm;
  std::vector<RowKey> warm_keys;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.present_in_row(r) == 0) {
      err << "warning: '" << m.row_keys()[r].label() << "' has no observed time; left empty (see `place`)\n";
      continue;
    }
    warm.push_back(r);
    warm_keys.push_back(m.row_keys()[r]);
  }
  if (warm.empty()) throw Error("every row is empty");
  std::vector<double> warm_cells;
  for (std::size_t r : warm)
    for (std::size_t c = 0; c < m.cols(); ++c) warm_cells.push_back(m.raw(r, c));
  PCMatrix train(warm_keys, m.col_keys(), std::move(warm_cells));

  const std::vector<Algorithm> algorithms{algorithm};
  const Completer completer(train, algorithms, eval);
  std::vector<double> cells(m.cells().begin(), m.cells().end());
  ordered_json filled = ordered_json::array();
  ordered_json unfilled = ordered_json::array();
  for (std::size_t i = 0; i < warm.size(); ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (train.present(i, c)) continue;
      const Outcome res = completer.predict(algorithm, i, c);
      ordered_json cell;
      cell["program"] = train.row_keys()[i].label();
      cell["machine"] = m.col_keys()[c];
      if (res.value) {
        cells[warm[i] * m.cols() + c] = *res.value;
        cell["algorithm"] = std::string(to_string(res.source.value_or(algorithm)));
        cell["predicted_seconds"] = *res.value;
        filled.push_back(std::move(cell));
      } else {
        cell["reason"] = res.reason;
        unfilled.push_back(std::move(cell));
      }
    }
  }
  const PCMatrix completed(m.row_keys(), m.col_keys(), std::move(cells));
  write_matrix_csv(fs::path(o.out), completed);

  ordered_json manifest = provenance(cfg, "complete", o.input);
  manifest["filled"] = std::move(filled);
  manifest["unfilled"] = unfilled;
  write_text(o.out + ".json", manifest.dump(2) + "\n");
  if (!unfilled.empty()) err << "warning: " << unfilled.size() << " cell(s) could not be predicted\n";

  if (!o.model_path.empty()) {
    const auto& model = algorithm == Algorithm::SVD ? completer.svd_model() : completer.als_model();
    if (!model) throw Error("--model needs algorithm als or svd");
    write_text(o.model_path, model_json(*model, provenance(cfg, "complete", o.input)).dump(2) + "\n");
  }
  out << "completed " << completed.rows() << "x" << completed.cols() << " -> " << o.out << '\n';
  return 0;
}

void write_report_files(const std::string& prefix, const ordered_json& doc, std::span<const EvalReport> reports) {
  write_text(prefix + ".json", doc.dump(2) + "\n");
  std::ofstream csv(prefix + ".csv", std::ios::binary);
  if (!csv) throw Error("cannot write '" + prefix + ".csv'");
  write_reports_csv(csv, reports);
}

void print_summary(std::span<const EvalReport> reports, std::ostream& out, std::ostream& err) {
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    if (r.skipped) continue;
    for (const auto& a : r.results)
      out << format_double(r.mask_fraction * 100.0) << "%\t" << to_string(a.algorithm) << "\t"
          << (std::isfinite(a.total_error) ? format_double(a.total_error) : std::string("n/a")) << "\t("
          << a.cells.size() << " cells, " << a.uncovered.size() << " uncovered)\n";
  }
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const PCMatrix m = read_matrix_csv(fs::path(o.input));
  const EvalConfig eval = cfg.eval_config();
  const EvalReport report =
      leave_one_out(m, parse_algorithm(cfg.algorithm), eval, parse_protocol(cfg.protocol), dataset_name(o.input));

  ordered_json doc = provenance(cfg, "evaluate", o.input);
  doc["report"] = report_json(report, m);
  write_report_files(o.out, doc, std::span<const EvalReport>(&report, 1));
  if (!o.grouping_path.empty()) {
    const Grouping g = find_cliques(build_graph(m, eval.cliques));
    write_text(o.grouping_path, grouping_json(g, eval.cliques, m).dump(2) + "\n");
  }
  if (report.groups)
    out << "groups " << report.groups->groups << ", size-1 groups " << report.groups->singletons << '\n';
  print_summary(std::span<const EvalReport>(&report, 1), out, err);
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err, bool with_outliers) {
  const RunConfig cfg = resolve_config(o);
  const PCMatrix m = read_matrix_csv(fs::path(o.input));
  const EvalConfig eval = cfg.eval_config();
  SweepSpec spec{cfg.fractions(), cfg.sweep_algorithms(), cfg.repeats, cfg.seed, dataset_name(o.input)};

  std::vector<EvalReport> reports;
  if (with_outliers) {
    const OutlierSpec outliers{cfg.outlier_percent / 100.0, cfg.outlier_lo, cfg.outlier_hi};
    reports = outlier_sweep(m, outliers, spec, eval);
  } else {
    reports = masking_sweep(m, spec, eval);
  }

  ordered_json doc = provenance(cfg, with_outliers ? "outliers" : "sweep", o.input);
  ordered_json list = ordered_json::array();
  for (const auto& r : reports) list.push_back(report_json(r, m));
  doc["reports"] = std::move(list);
  write_report_files(o.out, doc, reports);
  print_summary(reports, out, err);
  return 0;
}

int cmd_rank(const Options& o, std::ostream& out) {
  std::ifstream in(o.input);
  if (!in) throw Error("cannot open '" + o.input + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  const FactorModel model = model_from_json(j);
  const auto ranking = rank_machines(model);

  std::ostringstream text;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto it = std::find(model.col_keys.begin(), model.col_keys.end(), ranking[i]);
    ordered_json line;
    line["rank"] = i + 1;
    line["machine"] = ranking[i];
    line["embedding"] = model.col_factors(0, it - model.col_keys.begin());
    text << line.dump() << '\n';
  }
  if (o.out.empty())
    out << text.str();
  else
    write_text(o.out, text.str());
  return 0;
}

int cmd_place(const Options& o, std::ostream& out) {
  const PCMatrix m = read_matrix_csv(fs::path(o.input));
  std::vector<std::size_t> rows;
  if (o.programs.empty()) {
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(r);
  } else {
    for (const auto& label : split_list(o.programs)) {
      auto r = m.find_row(RowKey::parse(label));
      if (!r) throw Error("program '" + label + "' is not in the matrix");
      rows.push_back(*r);
    }
  }

  std::optional<std::vector<std::string>> ranking;
  if (!o.model_path.empty()) {
    std::ifstream in(o.model_path);
    if (!in) throw Error("cannot open '" + o.model_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed model JSON: ") + e.what());
    }
    const FactorModel model = model_from_json(j);
    if (model.k == 1) ranking = rank_machines(model);
  }

  std::ostringstream text;
  std::vector<std::size_t> warm;
  for (std::size_t r : rows) {
    if (o.schedule && m.present_in_row(r) != 0) {
      warm.push_back(r);
      continue;
    }
    std::optional<std::span<const std::string>> rank_view;
    if (ranking) rank_view = std::span<const std::string>(*ranking);
    text << placement_json(greedy_place(m, r, rank_view)).dump() << '\n';
  }
  if (o.schedule) {
    const Schedule s = schedule_batch(m, warm);
    for (const auto& [machine, assigned] : s.assignment)
      for (std::size_t r : assigned) {
        ordered_json line;
        line["program"] = m.row_keys()[r].label();
        line["machine"] = machine;
        line["predicted_seconds"] = m.raw(r, *m.find_col(machine));
        line["rationale"] = "Schedule";
        text << line.dump() << '\n';
      }
    ordered_json summary;
    summary["makespan"] = s.makespan;
    text << summary.dump() << '\n';
  }
  if (o.out.empty())
    out << text.str();
  else
    write_text(o.out, text.str());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Execution-time prediction on a programs x machines matrix", "pcpred"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", o.overrides, "override a config key: key=value (repeatable)")->allow_extra_args(false);
  app.add_option("--threads", o.threads, "cap on worker threads");
  app.add_option("--seed", o.seed, "random seed");

  auto* ingest = app.add_subcommand("ingest", "build a matrix CSV from an observation log");
  ingest->add_option("observations", o.input, "CSV with header program,args,machine,seconds")->required();
  ingest->add_option("-o,--out", o.out, "matrix CSV to write")->required();

  auto* complete = app.add_subcommand("complete", "fill every empty cell of a matrix");
  complete->add_option("matrix", o.input)->required();
  complete->add_option("-o,--out", o.out, "completed matrix CSV; a <out>.json manifest is written too")->required();
  complete->add_option("--algorithm", o.algorithm);
  complete->add_option("--model", o.model_path, "write the ALS/SVD factor model JSON here");

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-out evaluation");
  evaluate->add_option("matrix", o.input)->required();
  evaluate->add_option("-o,--out", o.out, "report prefix (<prefix>.json, <prefix>.csv)")->required();
  evaluate->add_option("--algorithm", o.algorithm);
  evaluate->add_option("--protocol", o.protocol, "regression | in-groups | in-groups+regression");
  evaluate->add_option("--grouping", o.grouping_path, "write the machine grouping JSON here");

  auto* sweep = app.add_subcommand("sweep", "random masking sweep");
  auto* outliers = app.add_subcommand("outliers", "masking sweep with outliers injected into training cells");
  for (auto* sub : {sweep, outliers}) {
    sub->add_option("matrix", o.input)->required();
    sub->add_option("-o,--out", o.out, "report prefix (<prefix>.json, <prefix>.csv)")->required();
    sub->add_option("--fractions", o.fractions, "masking percentages, e.g. 1,5,10");
    sub->add_option("--algorithms", o.algorithms, "comma list of algorithms");
    sub->add_option("--repeats", o.repeats);
  }
  outliers->add_option("--outlier-percent", o.outlier_percent, "percentage of cells corrupted");
  outliers->add_option("--interval", o.interval, "multiplier interval lo,hi");

  auto* rank = app.add_subcommand("rank", "order machines by K=1 embedding, fastest first");
  rank->add_option("model", o.input)->required();
  rank->add_option("-o,--out", o.out);

  auto* place = app.add_subcommand("place", "choose a machine per program, or schedule a batch");
  place->add_option("matrix", o.input, "completed matrix CSV")->required();
  place->add_option("--programs", o.programs, "comma list of program::args keys (default: all rows)");
  place->add_option("--model", o.model_path, "K=1 model used to place programs with no observed time");
  place->add_flag("--schedule", o.schedule, "build one schedule for all listed programs");
  place->add_option("-o,--out", o.out);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*complete) return cmd_complete(o, out, err);
    if (*evaluate) return cmd_evaluate(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err, false);
    if (*outliers) return cmd_sweep(o, out, err, true);
    if (*rank) return cmd_rank(o, out);
    if (*place) return cmd_place(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const std::string msg = e.what();
    return msg.rfind("unknown algorithm", 0) == 0 || msg.rfind("unknown protocol", 0) == 0 ||
                   msg.rfind("unknown config key", 0) == 0
               ? 2
               : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("pcpred");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pcpred::cli
