#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "pcpred/csv.hpp"
#include "pcpred/error.hpp"

using namespace pcpred;

TEST_CASE("parse_csv handles quotes and CRLF") {
  std::istringstream in("a,\"b,c\",\"d \"\"q\"\"\"\r\n\r\nx,,z\n");
  const auto recs = parse_csv(in);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].fields == std::vector<std::string>{"a", "b,c", "d \"q\""});
  CHECK(recs[1].fields == std::vector<std::string>{"x", "", "z"});
  CHECK(recs[1].line == 3);
}

TEST_CASE("read_observations") {
  std::istringstream in("program,args,machine,seconds,cpu\nP1,a,C1,5,8\nP1,a,C2,1e1,8\n");
  const auto obs = read_observations(in);
  REQUIRE(obs.size() == 2);
  CHECK(obs[1].seconds == 10.0);
  CHECK(obs[0].machine_id == "C1");
}

TEST_CASE("read_observations errors carry line numbers") {
  std::istringstream no_header("P1,a,C1,5\n");
  CHECK_THROWS_WITH_AS(read_observations(no_header), doctest::Contains("program,args,machine,seconds"), Error);
  std::istringstream bad_number("program,args,machine,seconds\nP1,a,C1,5\nP1,a,C2,fast\n");
  CHECK_THROWS_WITH_AS(read_observations(bad_number), doctest::Contains("line 3"), Error);
  std::istringstream zero("program,args,machine,seconds\nP1,a,C1,0\n");
  CHECK_THROWS_WITH_AS(read_observations(zero), doctest::Contains("line 2"), Error);
}

TEST_CASE("matrix CSV round trip with awkward ids") {
  const PCMatrix m({{"P1", "n=4"}, {"P,2", "x"}}, {"node \"a\"", "C,2"},
                   {1.5, test::kNaN, 0.1 + 0.2, 1e-7});
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("program::args,\"node \"\"a\"\"\",\"C,2\"\nP1::n=4,1.5,\n", 0) == 0);
  const auto back = read_matrix_csv(ss);
  CHECK(back == m);
}

TEST_CASE("matrix CSV errors") {
  std::istringstream ragged("program::args,C1,C2\nP::a,1\n");
  CHECK_THROWS_WITH_AS(read_matrix_csv(ragged), doctest::Contains("line 2"), Error);
  std::istringstream negative("program::args,C1\nP::a,-1\n");
  CHECK_THROWS_AS(read_matrix_csv(negative), Error);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 12345.678, 1e-300, 6.02e23}) CHECK(parse_double(format_double(v)) == v);
}
