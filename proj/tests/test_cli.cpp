#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "pcpred/csv.hpp"

using namespace pcpred;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run pcpred_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("pcpred_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string rank1_csv(std::size_t n, std::size_t m, std::uint64_t seed, double hole_fraction) {
  const auto p = test::planted_rank1(n, m, seed);
  const auto masked = hole_fraction > 0 ? mask_random(p.matrix, {hole_fraction, seed}).masked : p.matrix;
  std::ostringstream s;
  write_matrix_csv(s, masked);
  return s.str();
}

}  // namespace

TEST_CASE("ingest builds a matrix and reports duplicates") {
  TempDir dir("ingest");
  write(dir.file("obs.csv"),
        "program,args,machine,seconds\n"
        "bt,A,m1,10\n"
        "bt,A,m2,20\n"
        "cg,A,m1,4\n");
  auto r = pcpred_run({"ingest", dir.file("obs.csv"), "-o", dir.file("m.csv")});
  REQUIRE(r.code == 0);
  const auto m = read_matrix_csv(fs::path(dir.file("m.csv")));
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m.at(0, 1) == 20.0);
  CHECK_FALSE(m.present(1, 1));

  write(dir.file("dup.csv"), "program,args,machine,seconds\nbt,A,m1,10\nbt,A,m1,12\n");
  r = pcpred_run({"ingest", dir.file("dup.csv"), "-o", dir.file("d.csv")});
  CHECK(r.code == 0);
  CHECK(r.err.find("duplicate") != std::string::npos);
  CHECK(read_matrix_csv(fs::path(dir.file("d.csv"))).at(0, 0) == 11.0);

  write(dir.file("bad.csv"), "prog,machine,seconds\nbt,m1,10\n");
  r = pcpred_run({"ingest", dir.file("bad.csv"), "-o", dir.file("x.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("complete leaves a full matrix unchanged") {
  TempDir dir("complete_full");
  write(dir.file("m.csv"), rank1_csv(5, 4, 1, 0.0));
  const auto r = pcpred_run({"complete", dir.file("m.csv"), "-o", dir.file("c.csv")});
  REQUIRE(r.code == 0);
  CHECK(read_matrix_csv(fs::path(dir.file("c.csv"))) == read_matrix_csv(fs::path(dir.file("m.csv"))));
  CHECK(fs::exists(dir.file("c.csv.json")));
}

TEST_CASE("complete fills rank-1 holes") {
  TempDir dir("complete_holes");
  const auto p = test::planted_rank1(10, 8, 2);
  write(dir.file("m.csv"), rank1_csv(10, 8, 2, 0.3));
  const auto r = pcpred_run({"--set", "als.lambda=1e-10", "--set", "als.tol=1e-14", "--set", "als.max_iters=2000",
                             "complete", dir.file("m.csv"), "-o", dir.file("c.csv"), "--algorithm", "als", "--model",
                             dir.file("model.json")});
  REQUIRE(r.code == 0);
  const auto c = read_matrix_csv(fs::path(dir.file("c.csv")));
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      REQUIRE(c.present(i, j));
      CHECK(test::rel_err(c.raw(i, j), p.matrix.raw(i, j)) < 1e-3);
    }
  const auto ranked = pcpred_run({"rank", dir.file("model.json")});
  REQUIRE(ranked.code == 0);
  CHECK(ranked.out.find("\"rank\":1") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  TempDir dir("usage");
  write(dir.file("m.csv"), rank1_csv(4, 4, 3, 0.0));
  CHECK(pcpred_run({"complete", dir.file("m.csv"), "-o", dir.file("c.csv"), "--algorithm", "knn"}).code == 2);
  CHECK(pcpred_run({"--set", "nope=1", "complete", dir.file("m.csv"), "-o", dir.file("c.csv")}).code == 2);
  CHECK(pcpred_run({"frobnicate"}).code == 2);
  CHECK(pcpred_run({}).code == 2);
  CHECK(pcpred_run({"complete", dir.file("missing.csv"), "-o", dir.file("c.csv")}).code == 1);
}

TEST_CASE("sweep writes one point per fraction, reproducibly") {
  TempDir dir("sweep");
  write(dir.file("m.csv"), rank1_csv(12, 10, 4, 0.1));
  const std::vector<std::string> base{"--seed", "5", "sweep", dir.file("m.csv"), "--fractions", "1,5,10",
                                      "--algorithms", "ridge,als", "--repeats", "2", "-o"};
  auto a = base;
  a.push_back(dir.file("a"));
  auto b = base;
  b.push_back(dir.file("b"));
  REQUIRE(pcpred_run(a).code == 0);
  REQUIRE(pcpred_run(b).code == 0);
  const std::string csv = slurp(dir.file("a.csv"));
  CHECK(csv.rfind("fraction,algorithm,total_error,n_cells,n_uncovered\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
  CHECK(csv == slurp(dir.file("b.csv")));
  std::string ja = slurp(dir.file("a.json")), jb = slurp(dir.file("b.json"));
  // Only the input path differs, and here it is the same file.
  CHECK(ja == jb);
}

TEST_CASE("sweep skips infeasible fractions with a warning") {
  TempDir dir("sweep_skip");
  write(dir.file("m.csv"), rank1_csv(5, 5, 6, 0.0));
  const auto r = pcpred_run({"sweep", dir.file("m.csv"), "--fractions", "10,99", "--algorithms", "ridge",
                             "--repeats", "1", "-o", dir.file("s")});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("skipped") != std::string::npos);
  const std::string csv = slurp(dir.file("s.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("evaluate and outliers write reports") {
  TempDir dir("eval");
  write(dir.file("m.csv"), rank1_csv(8, 6, 7, 0.1));
  auto r = pcpred_run({"evaluate", dir.file("m.csv"), "--algorithm", "cliques", "--protocol", "in-groups", "-o",
                       dir.file("loo"), "--grouping", dir.file("g.json")});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir.file("loo.json")));
  CHECK(fs::exists(dir.file("g.json")));
  CHECK(r.out.find("groups") != std::string::npos);
  r = pcpred_run({"outliers", dir.file("m.csv"), "--fractions", "10", "--algorithms", "als", "--repeats", "1",
                  "--interval", "0,4", "-o", dir.file("o")});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.file("o.json")).find("\"protocol\": \"outliers\"") != std::string::npos);
}

TEST_CASE("rank needs a K=1 model") {
  TempDir dir("rank");
  write(dir.file("m.csv"), rank1_csv(6, 5, 8, 0.0));
  REQUIRE(pcpred_run({"--set", "als.k=2", "complete", dir.file("m.csv"), "-o", dir.file("c.csv"), "--model",
                      dir.file("k2.json")})
              .code == 0);
  const auto r = pcpred_run({"rank", dir.file("k2.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("K=1") != std::string::npos);
}

TEST_CASE("place handles warm and cold programs") {
  TempDir dir("place");
  write(dir.file("m.csv"), "program::args,C1,C2,C3\nbt::A,5,3,9\nnew::A,,,\n");
  write(dir.file("model.json"), R"({"k":1,"rows":[],"machines":[{"id":"C1","factors":[2.0]},)"
                                R"({"id":"C2","factors":[1.0]},{"id":"C3","factors":[0.5]}],"train_rmse_history":[]})");
  auto r = pcpred_run({"place", dir.file("m.csv"), "--model", dir.file("model.json")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(R"({"program":"bt::A","machine":"C2","predicted_seconds":3.0,"rationale":"MinPredicted"})") !=
        std::string::npos);
  CHECK(r.out.find(R"("program":"new::A","machine":"C3")") != std::string::npos);
  CHECK(r.out.find("ColdRowRankedFastest") != std::string::npos);

  r = pcpred_run({"place", dir.file("m.csv"), "--programs", "new::A"});
  CHECK(r.code == 1);

  r = pcpred_run({"place", dir.file("m.csv"), "--programs", "bt::A", "--schedule"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(R"({"makespan":3.0})") != std::string::npos);
}
