#include <doctest.h>

#include "oracles.hpp"
#include "scalefn/bounds.hpp"
#include "scalefn/cascade.hpp"
#include "scalefn/error.hpp"

using namespace scalefn;

TEST_SUITE("cascade") {

TEST_CASE("initial functions") {
  const Problem p = oracle::load("quincunx.json");
  const auto box = cascade::initial_samples(InitialFunctionKind::IndicatorBox, p.matrix, IntBox::symmetric({2, 2}));
  CHECK(box.values.size() == 1);
  CHECK(box.at({0, 0}) == 1.0);
  const auto hat = cascade::initial_samples(InitialFunctionKind::TensorHat, p.matrix, IntBox::symmetric({2, 2}));
  CHECK(hat.values.size() == 1);
  CHECK(cascade::initial_support_radius(InitialFunctionKind::TensorHat, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Haar cascade is an indicator at every level") {
  const Problem p = oracle::load("haar.json");
  const auto levels = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 6);
  for (const auto& f : levels) {
    const std::int64_t n = std::int64_t(1) << f.level;
    CHECK(f.values.size() == std::size_t(n));
    for (const auto& [k, v] : f.values) {
      CHECK(v == 1.0);
      CHECK(k[0] >= 0);
      CHECK(k[0] < n);
    }
  }
}

TEST_CASE("one step against the scaling equation written out") {
  // D4, level 1 from the box: G(k) = 2 sum_q c_q F0(k - q)
  const Problem p = oracle::load("d4.json");
  const auto levels = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 1);
  for (int k = 0; k < 4; ++k) CHECK(levels[1].at({k}) == doctest::Approx(2 * p.mask.coefficient({k})).epsilon(1e-15));
  CHECK(levels[1].at({4}) == 0.0);
}

TEST_CASE("discrete mass is conserved") {
  for (const char* name : {"haar.json", "d4.json", "quincunx.json", "jordan_box.json", "tri_matrix.json"}) {
    const Problem p = oracle::load(name);
    for (auto kind : {InitialFunctionKind::IndicatorBox, InitialFunctionKind::TensorHat}) {
      const auto levels = cascade::run_cascade(p, kind, 6);
      const double m0 = cascade::discrete_mass(p, levels[0]);
      for (const auto& f : levels) CHECK(std::abs(cascade::discrete_mass(p, f) - m0) <= 1e-12);
    }
  }
}

TEST_CASE("threads do not change the result") {
  const Problem p = oracle::load("quincunx.json");
  const auto a = cascade::run_cascade(p, InitialFunctionKind::TensorHat, 8, 1);
  const auto b = cascade::run_cascade(p, InitialFunctionKind::TensorHat, 8, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}

TEST_CASE("a target box that is too small is reported") {
  const Problem p = oracle::load("d4.json");
  const auto levels = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 1);
  try {
    cascade::cascade_step(p, levels[1], IntBox::symmetric({1}));
    FAIL("expected DomainTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainTooSmall);
  }
}

TEST_CASE("integer-lattice iteration agrees with the refining cascade") {
  // F_n at integers equals the level-n iterate sampled at M^n Z^d.
  const Problem p = oracle::load("quincunx.json");
  const auto levels = cascade::run_cascade(p, InitialFunctionKind::TensorHat, 4);
  const auto ints = cascade::cascade_integer_values(p, InitialFunctionKind::TensorHat, 4);
  const IntMatrix m4 = power(p.matrix.matrix(), 4);
  for (const auto& [k, v] : ints.values) CHECK(levels[4].at(m4.apply(k)) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("lattice map is the inverse power") {
  const Problem p = oracle::load("quincunx.json");
  const Eigen::MatrixXd map = cascade::lattice_map(p, 2);
  CHECK((map - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("empirical support of the Haar iterate") {
  const Problem p = oracle::load("haar.json");
  const auto levels = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 5);
  const auto s = cascade::empirical_support(p, levels.back());
  CHECK(s.lo[0] == 0.0);
  CHECK(s.hi[0] == doctest::Approx(1.0 - 1.0 / 32));
}

TEST_CASE("symbol and truncated product") {
  const Problem p = oracle::load("d4.json");
  Eigen::VectorXd u(1);
  u << 0.0;
  CHECK(cascade::m0_eval(p.mask, u) == std::complex<double>(1.0, 0.0));
  u << 0.5;
  CHECK(std::abs(cascade::m0_eval(p.mask, u)) <= 1e-15);  // zero at pi
  u << 0.25;
  // Haar: |prod_j cos(pi u 2^-j)| -> |sin(pi u)/(pi u)|
  const Problem h = oracle::load("haar.json");
  const double expected = std::sin(M_PI * 0.25) / (M_PI * 0.25);
  CHECK(std::abs(cascade::fourier_truncated_product(h, u, 40)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("truncated product converges and vanishes at integers for Haar") {
  const Problem h = oracle::load("haar.json");
  Eigen::VectorXd u(1);
  u << 1.0;
  CHECK(std::abs(cascade::fourier_truncated_product(h, u, 20)) <= 1e-5);
  for (double x : {0.1, 0.7, 1.3, 2.9}) {
    u << x;
    const auto a = cascade::fourier_truncated_product(h, u, 20), b = cascade::fourier_truncated_product(h, u, 40);
    // Moduli settle like 4^-J; the phase e^{-pi i u (1 - 2^-J)} only like 2^-J.
    CHECK(std::abs(std::abs(a) - std::abs(b)) <= 1e-8);
    CHECK(std::abs(a - b) <= M_PI * x * std::ldexp(1.0, -20) * (1 + 1e-6));
    CHECK(std::abs(cascade::fourier_truncated_product(h, u, 30) - b) <= 1e-8);
  }
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  for (unsigned j = 1; j <= 30; ++j)
    CHECK(cascade::fourier_truncated_product(oracle::load("quincunx.json"), zero, j) == std::complex<double>(1, 0));
}

TEST_CASE("support within the finite-level ball") {
  for (const char* name : {"haar.json", "d4.json", "quincunx.json", "jordan_box.json"}) {
    const Problem p = oracle::load(name);
    const double r0 = cascade::initial_support_radius(InitialFunctionKind::IndicatorBox, p.dim());
    const auto fs = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 8);
    for (const auto& f : fs) {
      const double r = bounds::finite_level_ball(p, r0, f.level);
      const Eigen::MatrixXd map = cascade::lattice_map(p, f.level);
      const double cell = map.norm();  // Frobenius >= diameter of one cell
      for (const auto& [k, v] : f.values)
        if (std::abs(v) > cascade::kDefaultEps) CHECK(cascade::coordinates(map, k).norm() <= r + cell);
    }
  }
}

TEST_CASE("Haar and D4 supports stabilize") {
  // The change between levels is bounded by Q*||M^-n|| and goes to zero.
  for (const char* name : {"haar.json", "d4.json"}) {
    const Problem p = oracle::load(name);
    const auto fs = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, 10);
    for (std::size_t n = 6; n < fs.size(); ++n) {
      const auto a = cascade::empirical_support(p, fs[n - 1]), b = cascade::empirical_support(p, fs[n]);
      const double tol = p.mask.radius() * std::ldexp(1.0, -int(n - 1));
      CHECK(std::abs(a.lo[0] - b.lo[0]) <= tol);
      CHECK(std::abs(a.hi[0] - b.hi[0]) <= tol);
    }
  }
}

}
