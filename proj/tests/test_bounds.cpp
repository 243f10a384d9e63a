#include <doctest.h>

#include "oracles.hpp"
#include "scalefn/bounds.hpp"
#include "scalefn/error.hpp"

using namespace scalefn;

TEST_SUITE("bounds") {

TEST_CASE("one-dimensional corollary") {
  CHECK(bounds::bound_1d(2, 1.0) == 1.0);
  CHECK(bounds::bound_1d(2, 3.0) == 3.0);
  CHECK(bounds::bound_1d(-3, 4.0) == 2.0);
  CHECK(bounds::ball_bound(oracle::load("haar.json")).radius == 1.0);
  CHECK(bounds::ball_bound(oracle::load("d4.json")).radius == 3.0);
}

TEST_CASE("norm ball for the quincunx") {
  const auto b = bounds::ball_bound(oracle::load("quincunx.json"));
  CHECK(std::abs(b.radius - (std::sqrt(2.0) + 1)) <= 1e-12);
}

TEST_CASE("non-contractive norm falls back to a general ball") {
  const Problem p = oracle::load("tri_matrix.json");
  CHECK_THROWS_AS(bounds::ball_bound(p), Error);
  CHECK(bounds::contraction_block(p) == 2);
  const auto g = bounds::general_ball_bound(p);
  // Q(||M^-1|| + ||M^-2||)/(1 - ||M^-2||) with Q = 2
  const double n1 = linalg::power_inverse_norm(p.matrix.matrix(), 1);
  const double n2 = linalg::power_inverse_norm(p.matrix.matrix(), 2);
  CHECK(g.radius == doctest::Approx(2 * (n1 + n2) / (1 - n2)).epsilon(1e-13));
}

TEST_CASE("general ball equals norm ball when one step contracts") {
  for (const char* name : {"haar.json", "d4.json", "quincunx.json", "jordan_box.json"}) {
    const Problem p = oracle::load(name);
    CHECK(std::abs(bounds::general_ball_bound(p).radius - bounds::ball_bound(p).radius) <= 1e-12);
  }
}

TEST_CASE("finite-level radius tends to the ball") {
  const Problem p = oracle::load("quincunx.json");
  const double r = bounds::ball_bound(p).radius;
  double prev = 0;
  for (unsigned n = 0; n <= 60; ++n) {
    const double rn = bounds::finite_level_ball(p, 0.5, n);
    if (n > 0) CHECK(rn >= prev - 1e-12);
    prev = rn;
  }
  CHECK(prev == doctest::Approx(r).epsilon(1e-9));
}

TEST_CASE("Jordan block closed forms") {
  for (std::size_t s = 1; s <= 5; ++s) {
    const auto b = bounds::jordan_block_bound(2.0, s, 1.5);
    for (std::size_t k = 1; k <= s; ++k) CHECK(b[k - 1] == 1.5 * double(k));
  }
  const auto b3 = bounds::jordan_block_bound(3.0, 3, 1.0);
  const auto o3 = oracle::jordan_limit(3.0, 3, 1.0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(b3[k] - o3[k]) <= 1e-12);
  CHECK_THROWS_AS(bounds::jordan_block_bound(0.5, 2, 1.0), Error);
}

TEST_CASE("recurrence table converges to the closed form") {
  for (double lambda : {3.0, -2.5, 4.0}) {
    const auto table = bounds::jordan_recurrence_table(lambda, 3, 1.0, 0.7, 200);
    const auto limit = oracle::jordan_limit(lambda, 3, 1.0);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(table.back()[k] - limit[k]) <= 1e-10);
  }
}

TEST_CASE("diagonal bound") {
  const Problem p = mask::parse_problem(
      R"({"dimension":2,"matrix":[[2,0],[0,3]],"coefficients":[{"q":[0,0],"c":"1/2"},{"q":[1,2],"c":"1/2"}]})");
  const auto b = bounds::diagonal_bound(p);
  const double q = std::sqrt(5.0);
  CHECK(b.half_widths[0] == doctest::Approx(q / 1));
  CHECK(b.half_widths[1] == doctest::Approx(q / 2));
  CHECK_THROWS_AS(bounds::diagonal_bound(oracle::load("quincunx.json")), Error);
}

TEST_CASE("parallelepiped bound reconstructs the transform") {
  const Problem p = oracle::load("jordan_box.json");
  const auto b = bounds::parallelepiped_bound(p);
  CHECK(b.kind == BoundKind::TransformedBox);
  CHECK((b.transform * b.transform_inverse - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  // Block of eigenvalue 2: Q' * k
  const double qp = bounds::transformed_mask_radius(p, b.transform_inverse);
  CHECK(b.half_widths[0] == doctest::Approx(qp));
  CHECK(b.half_widths[1] == doctest::Approx(2 * qp));
}

TEST_CASE("enclosing integer box covers the bound") {
  for (const char* name : {"haar.json", "d4.json", "quincunx.json", "jordan_box.json", "tri_matrix.json"}) {
    const Problem p = oracle::load(name);
    for (const auto& attempt : bounds::all_bounds(p)) {
      if (!attempt.bound) continue;
      const IntBox box = bounds::enclosing_integer_box(*attempt.bound);
      const auto extent = bounds::coordinate_extent(*attempt.bound);
      for (std::size_t i = 0; i < p.dim(); ++i) CHECK(double(box.hi[i]) >= extent[i] - 1e-9);
    }
  }
}

TEST_CASE("best bound prefers the ball and falls back") {
  CHECK(bounds::best_bound(oracle::load("d4.json")).kind == BoundKind::Ball);
  CHECK(bounds::best_bound(oracle::load("tri_matrix.json")).kind != BoundKind::Ball);
}

}
