#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "kgae/io.hpp"
#include "kgae/matrix.hpp"

using kgae::Dataset;
using kgae::MatD;

TEST_CASE("matrix construction and access") {
  MatD m(2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  m(1, 2) = 4.5;
  CHECK(m(1, 2) == 4.5);
  CHECK(m(0, 0) == 0.0);

  const MatD f = MatD::from_rows({{1, 2}, {3, 4}});
  CHECK(f(0, 1) == 2.0);
  CHECK(f(1, 0) == 3.0);
  CHECK_THROWS_AS(MatD::from_rows({{1, 2}, {3}}), std::invalid_argument);
}

TEST_CASE("matmul and transpose agree with hand results") {
  const MatD a = MatD::from_rows({{1, 2}, {3, 4}});
  const MatD b = MatD::from_rows({{5, 6}, {7, 8}});
  const MatD c = kgae::matmul(a, b);
  CHECK(c(0, 0) == 19.0);
  CHECK(c(0, 1) == 22.0);
  CHECK(c(1, 0) == 43.0);
  CHECK(c(1, 1) == 50.0);
  const MatD at = kgae::transpose(a);
  CHECK(at(0, 1) == 3.0);
  CHECK_THROWS_AS(kgae::matmul(a, MatD(3, 2)), std::invalid_argument);
}

TEST_CASE("csv round trip preserves exact doubles") {
  Dataset d(2, 3);
  d(0, 0) = 0.1;
  d(0, 1) = -1.0 / 3.0;
  d(0, 2) = 1e-300;
  d(1, 0) = 12345.6789;
  d(1, 1) = 0.0;
  d(1, 2) = -2.5e17;
  std::ostringstream out;
  kgae::write_csv(out, d);
  std::istringstream in(out.str());
  const Dataset back = kgae::read_csv(in);
  REQUIRE(back.same_shape(d));
  CHECK(back.data() == d.data());
}

TEST_CASE("csv rejects ragged rows and junk") {
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(kgae::read_csv(ragged), kgae::io_error);
  std::istringstream junk("1,two\n");
  CHECK_THROWS_AS(kgae::read_csv(junk), kgae::io_error);
}

TEST_CASE("empty csv gives empty matrix") {
  std::istringstream in("");
  const Dataset d = kgae::read_csv(in);
  CHECK(d.rows() == 0);
  CHECK(d.cols() == 0);
}
