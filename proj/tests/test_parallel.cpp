#include <doctest.h>

#include "helpers.hpp"
#include "pcpred/cliques.hpp"
#include "pcpred/evaluation.hpp"
#include "pcpred/factorization.hpp"

using namespace pcpred;

namespace {

PCMatrix noisy_masked(std::size_t n, std::size_t m, std::uint64_t seed, double fraction) {
  const auto p = test::planted_rank1(n, m, seed);
  Rng rng(seed + 1);
  std::vector<double> cells(p.matrix.cells().begin(), p.matrix.cells().end());
  for (auto& v : cells) v *= rng.uniform(0.8, 1.25);
  return mask_random(PCMatrix(p.matrix.row_keys(), p.matrix.col_keys(), cells), {fraction, seed + 2}).masked;
}

void check_same(const std::vector<EvalReport>& a, const std::vector<EvalReport>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].results.size() == b[i].results.size());
    for (std::size_t k = 0; k < a[i].results.size(); ++k) {
      const auto& x = a[i].results[k];
      const auto& y = b[i].results[k];
      REQUIRE(x.cells.size() == y.cells.size());
      for (std::size_t c = 0; c < x.cells.size(); ++c) {
        CHECK(x.cells[c].row == y.cells[c].row);
        CHECK(x.cells[c].col == y.cells[c].col);
        CHECK(x.cells[c].predicted == y.cells[c].predicted);
      }
      CHECK(x.uncovered.size() == y.uncovered.size());
    }
  }
}

}  // namespace

TEST_CASE("similarity graph: parallel equals serial") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto m = noisy_masked(40, 30, seed, 0.3);
    const CliqueConfig cfg{0.9, 3};
    CHECK(build_graph(m, cfg, Exec::Parallel) == build_graph_serial(m, cfg));
    CHECK(build_graph(m, cfg, Exec::Serial) == build_graph_serial(m, cfg));
  }
}

TEST_CASE("ALS: parallel equals serial") {
  const auto m = noisy_masked(50, 30, 4, 0.4);
  ALSConfig cfg;
  cfg.k = 2;
  cfg.seed = 11;
  const auto a = als_fit(m, cfg, Exec::Serial);
  const auto b = als_fit(m, cfg, Exec::Parallel);
  CHECK(a.row_factors == b.row_factors);
  CHECK(a.col_factors == b.col_factors);
  CHECK(a.train_rmse_history == b.train_rmse_history);
}

TEST_CASE("leave-one-out and sweeps: parallel equals serial") {
  const auto m = noisy_masked(12, 8, 5, 0.2);
  EvalConfig serial;
  serial.exec = Exec::Serial;
  EvalConfig parallel;
  parallel.exec = Exec::Parallel;
  for (auto a : {Algorithm::Ridge, Algorithm::Cliques, Algorithm::Ensemble}) {
    check_same({leave_one_out(m, a, serial)}, {leave_one_out(m, a, parallel)});
  }
  SweepSpec spec;
  spec.fractions = {0.1, 0.3};
  spec.algorithms = {Algorithm::Ridge, Algorithm::Cliques, Algorithm::ALS, Algorithm::SVD, Algorithm::Ensemble};
  spec.repeats = 2;
  spec.seed = 8;
  check_same(masking_sweep(m, spec, serial), masking_sweep(m, spec, parallel));
  check_same(outlier_sweep(m, {}, spec, serial), outlier_sweep(m, {}, spec, parallel));
}
