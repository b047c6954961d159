#include "pcpred/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pcpred/csv.hpp"
#include "pcpred/error.hpp"

namespace pcpred {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out{};
  const auto t = trim(value);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw Error("config key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const Error&) {
    throw Error("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "algorithm") {
    parse_algorithm(value);
    algorithm = value;
  } else if (key == "protocol") {
    parse_protocol(value);
    protocol = value;
  } else if (key == "ridge.lambda") {
    ridge.lambda = parse_real(key, value);
  } else if (key == "ridge.min_training_rows") {
    ridge.min_training_rows = parse_int<std::size_t>(key, value);
  } else if (key == "cliques.threshold") {
    cliques.threshold = parse_real(key, value);
  } else if (key == "cliques.min_overlap") {
    cliques.min_overlap = parse_int<std::size_t>(key, value);
  } else if (key == "als.k") {
    als.k = parse_int<std::size_t>(key, value);
  } else if (key == "als.lambda") {
    als.lambda = parse_real(key, value);
  } else if (key == "als.max_iters") {
    als.max_iters = parse_int<std::size_t>(key, value);
  } else if (key == "als.tol") {
    als.tol = parse_real(key, value);
  } else if (key == "svd.k") {
    svd_k = parse_int<std::size_t>(key, value);
  } else if (key == "svd.max_outer") {
    svd_max_outer = parse_int<std::size_t>(key, value);
  } else if (key == "ensemble.members") {
    ensemble_members = split_list(value);
    for (const auto& a : ensemble_members) parse_algorithm(a);
  } else if (key == "algorithms") {
    algorithms = split_list(value);
    for (const auto& a : algorithms) parse_algorithm(a);
  } else if (key == "fractions") {
    fractions_percent.clear();
    for (const auto& f : split_list(value)) fractions_percent.push_back(parse_real(key, f));
  } else if (key == "repeats") {
    repeats = parse_int<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "threads") {
    threads = parse_int<int>(key, value);
  } else if (key == "outlier.percent") {
    outlier_percent = parse_real(key, value);
  } else if (key == "outlier.lo") {
    outlier_lo = parse_real(key, value);
  } else if (key == "outlier.hi") {
    outlier_hi = parse_real(key, value);
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error("override must look like key=value, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::string> fr;
  for (double f : fractions_percent) fr.push_back(format_double(f));
  return {
      {"algorithm", algorithm},
      {"protocol", protocol},
      {"ridge.lambda", format_double(ridge.lambda)},
      {"ridge.min_training_rows", std::to_string(ridge.min_training_rows)},
      {"cliques.threshold", format_double(cliques.threshold)},
      {"cliques.min_overlap", std::to_string(cliques.min_overlap)},
      {"als.k", std::to_string(als.k)},
      {"als.lambda", format_double(als.lambda)},
      {"als.max_iters", std::to_string(als.max_iters)},
      {"als.tol", format_double(als.tol)},
      {"svd.k", std::to_string(svd_k)},
      {"svd.max_outer", std::to_string(svd_max_outer)},
      {"ensemble.members", join(ensemble_members)},
      {"algorithms", join(algorithms)},
      {"fractions", join(fr)},
      {"repeats", std::to_string(repeats)},
      {"seed", std::to_string(seed)},
      {"threads", std::to_string(threads)},
      {"outlier.percent", format_double(outlier_percent)},
      {"outlier.lo", format_double(outlier_lo)},
      {"outlier.hi", format_double(outlier_hi)},
  };
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig cfg;
  cfg.ridge = ridge;
  cfg.cliques = cliques;
  cfg.als = als;
  cfg.als.seed = seed;
  cfg.svd_rank = svd_k;
  cfg.svd_max_outer = svd_max_outer;
  cfg.ensemble_members.clear();
  for (const auto& a : ensemble_members) cfg.ensemble_members.push_back(parse_algorithm(a));
  cfg.validate();
  return cfg;
}

std::vector<Algorithm> RunConfig::sweep_algorithms() const {
  std::vector<Algorithm> out;
  for (const auto& a : algorithms) out.push_back(parse_algorithm(a));
  return out;
}

std::vector<double> RunConfig::fractions() const {
  std::vector<double> out;
  for (double p : fractions_percent) out.push_back(p / 100.0);
  return out;
}

}  // namespace pcpred
