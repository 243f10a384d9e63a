#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scalefn/bounds.hpp"
#include "scalefn/cascade.hpp"
#include "scalefn/error.hpp"
#include "scalefn/pointwise.hpp"

using namespace scalefn;

namespace {

// Random mask with integer weights normalized exactly to sum 1.
Problem random_problem(std::mt19937& rng, const IntMatrix& m, int reach, int taps) {
  const std::size_t d = m.dim();
  std::uniform_int_distribution<int> coord(0, reach), weight(1, 5);
  std::map<IntVec, int> w;
  for (int t = 0; t < taps; ++t) {
    IntVec q(d);
    for (auto& x : q) x = coord(rng);
    w[q] += weight(rng);
  }
  int total = 0;
  for (auto& [q, v] : w) total += v;
  std::vector<MaskEntry> entries;
  for (auto& [q, v] : w) {
    const Rational r(v, total);
    entries.push_back({q, static_cast<double>(r), r});
  }
  return make_problem(m, Mask(d, entries));
}

// Each coset of M Z^d gets total weight exactly 1/m, split over a few taps.
Problem balanced_problem(std::mt19937& rng, const IntMatrix& m) {
  const std::size_t d = m.dim();
  const Problem probe = make_problem(m, Mask(d, {{IntVec(d, 0), 1.0, Rational(1)}}));
  const auto classes = mask::coset_sum_report(probe).classes;
  const std::int64_t det = probe.m();
  std::uniform_int_distribution<int> bit(0, 1), weight(1, 4);
  std::map<IntVec, Rational> w;
  for (const auto& c : classes) {
    std::vector<std::pair<IntVec, int>> taps;
    int total = 0;
    for (int t = 0; t < 2; ++t) {
      IntVec shift(d);
      for (auto& x : shift) x = bit(rng);
      const int wt = weight(rng);
      taps.emplace_back(add(c.representative, m.apply(shift)), wt);
      total += wt;
    }
    for (auto& [q, wt] : taps) w[q] += Rational(wt, total * det);
  }
  std::vector<MaskEntry> entries;
  for (auto& [q, r] : w) entries.push_back({q, static_cast<double>(r), r});
  return make_problem(m, Mask(d, entries));
}

const std::vector<IntMatrix>& matrices() {
  static const std::vector<IntMatrix> all{
      {{2}}, {{3}}, {{-2}}, {{1, 1}, {1, -1}}, {{2, 0}, {1, 2}}, {{0, 1}, {3, 1}}, {{1, -1}, {1, 1}}, {{2, 1}, {0, 2}}};
  return all;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("cascade conserves mass and stays inside the bound") {
  std::mt19937 rng(2024);
  for (const auto& m : matrices()) {
    for (int trial = 0; trial < 4; ++trial) {
      const Problem p = random_problem(rng, m, 3, 5);
      const unsigned levels = m.dim() == 1 ? 8 : 6;
      const auto fs = cascade::run_cascade(p, trial % 2 ? InitialFunctionKind::TensorHat : InitialFunctionKind::IndicatorBox,
                                           levels);
      const double m0 = cascade::discrete_mass(p, fs[0]);
      const auto bound = bounds::best_bound(p);
      // Level-n iterates of the indicator/hat live within the finite-level radius,
      // which tends to the bound; check the limit box inflated by the finite-level excess.
      const IntBox box = bounds::enclosing_integer_box(bound);
      for (const auto& f : fs) {
        CHECK(std::abs(cascade::discrete_mass(p, f) - m0) <= 1e-12);
        const auto s = cascade::empirical_support(p, f);
        if (s.empty) continue;
        const double r = bounds::level_radius(p, cascade::initial_support_radius(InitialFunctionKind::TensorHat, p.dim()),
                                              f.iterations);
        for (std::size_t i = 0; i < p.dim(); ++i) {
          CHECK(s.lo[i] >= -std::max(double(box.hi[i]), r) - 1e-9);
          CHECK(s.hi[i] <= std::max(double(box.hi[i]), r) + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("support change per level is controlled by the contraction") {
  // Consecutive empirical supports differ by at most Q * ||M^-n||.
  std::mt19937 rng(99);
  for (const auto& m : matrices()) {
    const Problem p = random_problem(rng, m, 2, 4);
    const auto fs = cascade::run_cascade(p, InitialFunctionKind::IndicatorBox, m.dim() == 1 ? 10 : 7);
    for (std::size_t n = 1; n < fs.size(); ++n) {
      const auto a = cascade::empirical_support(p, fs[n - 1]);
      const auto b = cascade::empirical_support(p, fs[n]);
      if (a.empty || b.empty) continue;
      const double step = p.mask.radius() * linalg::power_inverse_norm(p.matrix.matrix(), unsigned(n)) +
                          2 * cascade::initial_support_radius(InitialFunctionKind::IndicatorBox, p.dim()) *
                              linalg::power_inverse_norm(p.matrix.matrix(), unsigned(n - 1));
      for (std::size_t i = 0; i < p.dim(); ++i) {
        CHECK(std::abs(b.lo[i] - a.lo[i]) <= step + 1e-12);
        CHECK(std::abs(b.hi[i] - a.hi[i]) <= step + 1e-12);
      }
    }
  }
}

TEST_CASE("refined values are consistent across levels") {
  std::mt19937 rng(5);
  int unique = 0;
  for (const auto& m : matrices()) {
    for (int trial = 0; trial < 3; ++trial) {
      const Problem p = trial ? balanced_problem(rng, m) : random_problem(rng, m, 2, 4);
      SupportBound region;
      try {
        region = bounds::best_bound(p);
      } catch (const Error&) {
        continue;
      }
      IntegerValues v;
      try {
        v = pointwise::integer_values(pointwise::build_transfer_matrix(p, pointwise::candidate_points(region)));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoUnitEigenvalue);
        CHECK_FALSE(mask::coset_sum_report(p).balanced);
        continue;
      }
      const auto level0 = pointwise::level0_values(v, v.non_unique);
      unique += !v.non_unique;
      const auto table = pointwise::refine_values(p, region, level0, 3);
      for (unsigned j = 1; j <= 3; ++j)
        for (const auto& [k, x] : table.levels.at(j - 1)) {
          auto it = table.levels.at(j).find(p.matrix.matrix().apply(k));
          if (it != table.levels.at(j).end()) CHECK(std::abs(it->second - x) <= 1e-12);
        }
      CHECK(v.residual <= 1e-8);
    }
  }
  CHECK(unique > 0);
}

TEST_CASE("powers and inverses agree") {
  for (const auto& m : matrices()) {
    for (unsigned n = 0; n <= 6; ++n) {
      const RationalMatrix prod = multiply(linalg::inverse_power(m, n), RationalMatrix(power(m, n)));
      CHECK(prod == RationalMatrix::identity(m.dim()));
    }
  }
}

}
