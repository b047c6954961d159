#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pcpred/config.hpp"
#include "pcpred/error.hpp"

using namespace pcpred;
namespace fs = std::filesystem;

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.seed == 42);
  CHECK(cfg.fractions().size() == 12);
  CHECK(cfg.fractions().front() == doctest::Approx(0.01));
  const auto eval = cfg.eval_config();
  CHECK(eval.als.seed == 42);
  CHECK(eval.ensemble_members.size() == 3);
}

TEST_CASE("set parses every key and entries echoes it back") {
  RunConfig a;
  a.set("algorithm", "ridge");
  a.set("ridge.lambda", "0.5");
  a.set("cliques.threshold", "0.9");
  a.set("als.k", "3");
  a.set("fractions", "1, 5,10");
  a.set("algorithms", "als,svd");
  a.set("seed", "7");
  a.set("outlier.hi", "8");
  CHECK(a.ridge.lambda == 0.5);
  CHECK(a.als.k == 3);
  CHECK(a.fractions_percent == std::vector<double>{1, 5, 10});
  CHECK(a.sweep_algorithms() == std::vector<Algorithm>{Algorithm::ALS, Algorithm::SVD});

  RunConfig b;
  for (const auto& [k, v] : a.entries()) b.set(k, v);
  CHECK(b.entries() == a.entries());
}

TEST_CASE("bad keys and values") {
  RunConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.set("als.rank", "2"), doctest::Contains("unknown config key"), Error);
  CHECK_THROWS_AS(cfg.set("als.k", "two"), Error);
  CHECK_THROWS_AS(cfg.set("als.k", "2.5"), Error);
  CHECK_THROWS_AS(cfg.set("algorithm", "knn"), Error);
  CHECK_THROWS_AS(cfg.apply_override("seed"), Error);
}

TEST_CASE("load_file with comments and overrides") {
  const fs::path dir = fs::temp_directory_path() / "pcpred_test_config";
  fs::create_directories(dir);
  const fs::path file = dir / "run.cfg";
  {
    std::ofstream f(file);
    f << "# settings\n\nalgorithm = cliques\nals.lambda = 1e-4  # small\nrepeats=3\n";
  }
  RunConfig cfg;
  cfg.load_file(file);
  CHECK(cfg.algorithm == "cliques");
  CHECK(cfg.als.lambda == 1e-4);
  CHECK(cfg.repeats == 3);
  cfg.apply_override("repeats=9");
  CHECK(cfg.repeats == 9);

  {
    std::ofstream f(file);
    f << "algorithm = als\nbogus = 1\n";
  }
  RunConfig bad;
  CHECK_THROWS_WITH_AS(bad.load_file(file), doctest::Contains(":2:"), Error);
  CHECK_THROWS_AS(bad.load_file(dir / "missing.cfg"), Error);
  fs::remove_all(dir);
}

TEST_CASE("split_list") {
  CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_list("").empty());
}
