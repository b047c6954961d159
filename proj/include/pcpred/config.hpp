#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pcpred/evaluation.hpp"

namespace pcpred {

/// Run settings shared by every CLI command. Loaded from a flat `key = value`
/// file (`#` starts a comment); command-line flags override file values.
///
/// Keys:
///   algorithm            ridge | cliques | als | svd | ensemble
///   protocol             regression | in-groups | in-groups+regression
///   ridge.lambda         ridge.min_training_rows
///   cliques.threshold    cliques.min_overlap
///   als.k  als.lambda  als.max_iters  als.tol
///   svd.k  svd.max_outer
///   ensemble.members     comma list, default ridge,cliques,als
///   algorithms           comma list used by sweep/outliers
///   fractions            comma list of masking percentages, e.g. 1,5,10
///   repeats  seed  threads
///   outlier.percent  outlier.lo  outlier.hi
struct RunConfig {
  std::string algorithm = "als";
  std::string protocol = "in-groups+regression";
  RidgeConfig ridge;
  CliqueConfig cliques;
  ALSConfig als;
  std::size_t svd_k = 1;
  std::size_t svd_max_outer = 100;
  std::vector<std::string> ensemble_members{"ridge", "cliques", "als"};
  std::vector<std::string> algorithms{"ridge", "cliques", "als", "ensemble"};
  std::vector<double> fractions_percent{1, 5, 10, 15, 20, 30, 40, 50, 60, 70, 80, 90};
  std::size_t repeats = 5;
  std::uint64_t seed = 42;
  int threads = 0;  // 0: OpenMP default
  double outlier_percent = 10.0;
  double outlier_lo = 0.0;
  double outlier_hi = 4.0;

  /// Parses and stores one key. Throws Error on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::filesystem::path& path);
  /// "key=value" override.
  void apply_override(const std::string& assignment);

  /// Every key with its current value, in documentation order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  EvalConfig eval_config() const;
  std::vector<Algorithm> sweep_algorithms() const;
  std::vector<double> fractions() const;
};

std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace pcpred
