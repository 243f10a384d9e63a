#include <doctest.h>

#include <limits>
#include <random>
#include <sstream>

#include "scalefn/error.hpp"
#include "scalefn/table_io.hpp"

using namespace scalefn;

TEST_SUITE("table_io") {

TEST_CASE("shortest round-trip numbers") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, double(i % 40 - 20));
    CHECK(std::stod(table_io::format_double(x)) == x);
  }
  CHECK(table_io::format_double(0.5) == "0.5");
  CHECK(table_io::format_double(1.0) == "1");
}

TEST_CASE("header layout") {
  CHECK(table_io::header(2) == "level\tk1\tk2\tx1\tx2\tvalue");
}

TEST_CASE("write then parse") {
  LatticeValues v{{{0, 1}, 0.1}, {{-3, 2}, -1e-300}, {{5, 5}, 0.0}};
  Eigen::MatrixXd map(2, 2);
  map << 0.5, 0.5, 0.5, -0.5;
  std::ostringstream out;
  out << table_io::header(2) << '\n';
  table_io::write_level(out, 1, v, map);
  table_io::write_level(out, 2, v, map * map);
  const auto table = table_io::parse(out.str(), 2);
  REQUIRE(table.size() == 2);
  CHECK(table.at(1) == v);
  CHECK(table.at(2) == v);
}

TEST_CASE("malformed tables") {
  CHECK_THROWS_AS(table_io::parse("0\t1\t1\t0.5\n", 1), Error);             // no header
  CHECK_THROWS_AS(table_io::parse("level\tk1\tx1\tvalue\n0\t1\t1\n", 1), Error);  // short row
  CHECK_THROWS_AS(table_io::parse("level\tk1\tx1\tvalue\n0\ta\t1\t2\n", 1), Error);
  CHECK_THROWS_AS(table_io::parse("level\tk1\tk2\tx1\tx2\tvalue\n", 1), Error);  // wrong dimension
}

}
