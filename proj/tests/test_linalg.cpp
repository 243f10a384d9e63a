#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polynomial.hpp"
#include "scalefn/error.hpp"
#include "scalefn/linalg.hpp"

using namespace scalefn;

TEST_SUITE("linalg") {

TEST_CASE("determinant matches permutation expansion") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> entry(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 5;
    std::vector<std::vector<std::int64_t>> rows(d, std::vector<std::int64_t>(d));
    IntMatrix m(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j] = entry(rng);
    CHECK(linalg::determinant(m) == oracle::brute_determinant(rows));
  }
}

TEST_CASE("exact inverse times matrix is identity") {
  const IntMatrix m{{0, 1}, {3, 1}};
  const RationalMatrix inv = linalg::inverse(m);
  CHECK(inv(0, 0) == Rational(-1, 3));
  CHECK(inv(0, 1) == Rational(1, 3));
  CHECK(inv(1, 0) == Rational(1));
  CHECK(inv(1, 1) == Rational(0));
  CHECK(multiply(inv, RationalMatrix(m)) == RationalMatrix::identity(2));
}

TEST_CASE("singular matrix is rejected") {
  try {
    linalg::inverse(IntMatrix{{1, 2}, {2, 4}});
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("operator norm is the largest singular value") {
  // [[3,0],[4,5]] has singular values 3*sqrt(5) and sqrt(5).
  CHECK(linalg::operator_norm(IntMatrix{{3, 0}, {4, 5}}) == doctest::Approx(3 * std::sqrt(5.0)).epsilon(1e-14));
  CHECK(linalg::operator_norm(IntMatrix{{1, 1}, {1, -1}}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // ||A^-1|| = 1/sigma_min(A); sigma^2 of [[0,1],[3,1]] solve t^2 - 11t + 9 = 0.
  const double smin = std::sqrt((11 - std::sqrt(85.0)) / 2);
  CHECK(linalg::operator_norm(linalg::inverse(IntMatrix{{0, 1}, {3, 1}})) == doctest::Approx(1 / smin).epsilon(1e-13));
}

TEST_CASE("characteristic polynomial") {
  // t^2 - t - 3, lowest degree first
  const auto p = linalg::characteristic_polynomial(IntMatrix{{0, 1}, {3, 1}});
  REQUIRE(p.size() == 3);
  CHECK(p[0] == -3);
  CHECK(p[1] == -1);
  CHECK(p[2] == 1);
}

TEST_CASE("spectrum of the worked example") {
  const auto s = linalg::eigenvalues(IntMatrix{{0, 1}, {3, 1}});
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.all_real);
  CHECK(s.eigenvalues[0].real() == doctest::Approx((1 + std::sqrt(13.0)) / 2).epsilon(1e-14));
  CHECK(s.eigenvalues[1].real() == doctest::Approx((1 - std::sqrt(13.0)) / 2).epsilon(1e-14));
}

TEST_CASE("repeated and complex eigenvalues") {
  const auto j = linalg::eigenvalues(IntMatrix{{2, 0}, {1, 2}});
  REQUIRE(j.distinct.size() == 1);
  CHECK(j.distinct[0].multiplicity == 2);
  CHECK(j.distinct[0].value.real() == doctest::Approx(2.0));

  const auto r = linalg::eigenvalues(IntMatrix{{1, -1}, {1, 1}});
  CHECK_FALSE(r.all_real);
  for (auto z : r.eigenvalues) CHECK(std::abs(z) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("eigenvalue product and sum against determinant and trace") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 4;
    IntMatrix m(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = entry(rng);
    if (linalg::determinant(m) == 0) continue;
    const auto s = linalg::eigenvalues(m);
    std::complex<double> prod = 1, sum = 0;
    for (auto z : s.eigenvalues) prod *= z, sum += z;
    const double det = double(linalg::determinant(m));
    CHECK(std::abs(prod - det) <= 1e-7 * std::max(1.0, std::abs(det)));
    CHECK(std::abs(sum - double(m.trace())) <= 1e-7 * std::max(1.0, double(std::abs(m.trace()))));
  }
}

TEST_CASE("dilation verdicts") {
  CHECK(linalg::is_dilation(IntMatrix{{0, 1}, {3, 1}}).is_dilation);
  CHECK(linalg::is_dilation(IntMatrix{{1, 1}, {1, -1}}).is_dilation);
  CHECK_FALSE(linalg::is_dilation(IntMatrix{{1, 1}, {0, 2}}).is_dilation);  // eigenvalue 1
  CHECK_FALSE(linalg::is_dilation(IntMatrix{{1, 2}, {2, 4}}).is_dilation);
  CHECK_THROWS_AS(DilationMatrix::create(IntMatrix{{1, 0}, {0, 3}}), Error);
}

TEST_CASE("first contractive power") {
  CHECK(linalg::first_contractive_power(IntMatrix{{2}}) == 1u);
  CHECK(linalg::first_contractive_power(IntMatrix{{0, 1}, {3, 1}}) == 2u);
  CHECK(linalg::power_inverse_norm(IntMatrix{{0, 1}, {3, 1}}, 1) > 1.0);
}

TEST_CASE("inverse powers are exact") {
  const IntMatrix m{{1, 1}, {1, -1}};
  const RationalMatrix p = linalg::inverse_power(m, 4);  // M^4 = 4I
  CHECK(p(0, 0) == Rational(1, 4));
  CHECK(p(0, 1) == Rational(0));
  CHECK(power(m, 4) == IntMatrix{{4, 0}, {0, 4}});
}

TEST_CASE("overflow is detected") {
  CHECK_THROWS_AS(power(IntMatrix{{1000000}}, 4), Error);
}

TEST_CASE("Jordan structure of a defective matrix") {
  const IntMatrix m{{2, 0}, {1, 2}};
  const auto js = linalg::real_jordan_structure(m);
  REQUIRE(js.blocks.size() == 1);
  CHECK(js.blocks[0].size == 2);
  const Eigen::MatrixXd back = js.transform * js.jordan_matrix() * js.transform_inverse;
  CHECK((back - m.to_dense()).norm() <= 1e-10);
}

TEST_CASE("Jordan structure of the worked example") {
  const IntMatrix m{{0, 1}, {3, 1}};
  const auto js = linalg::real_jordan_structure(m);
  CHECK(js.blocks.size() == 2);
  const Eigen::MatrixXd back = js.transform * js.jordan_matrix() * js.transform_inverse;
  CHECK((back - m.to_dense()).norm() <= 1e-10);
}

TEST_CASE("complex spectrum has no real Jordan form") {
  try {
    linalg::real_jordan_structure(IntMatrix{{1, -1}, {1, 1}});
    FAIL("expected ComplexSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ComplexSpectrum);
  }
}

TEST_CASE("square-free factorization finds multiplicities") {
  // (t-2)^3 (t+1)
  const auto p = poly::from_integers({-8, 4, 6, -5, 1});
  const auto factors = poly::squarefree_factorization(p);
  std::size_t total = 0;
  for (const auto& f : factors) total += (f.poly.size() - 1) * f.multiplicity;
  CHECK(total == 4);
  bool cubic = false;
  for (const auto& f : factors) cubic = cubic || (f.multiplicity == 3 && f.poly.size() == 2);
  CHECK(cubic);
}

}
