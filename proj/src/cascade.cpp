#include "scalefn/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

#include "scalefn/bounds.hpp"
#include "scalefn/error.hpp"

namespace scalefn {

double SampledFunction::at(const IntVec& k) const {
  auto it = values.find(k);
  return it == values.end() ? 0.0 : it->second;
}

namespace cascade {
namespace {

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n / 256 + 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace

double initial_support_radius(InitialFunctionKind kind, std::size_t dim) {
  const double root = std::sqrt(static_cast<double>(dim));
  return kind == InitialFunctionKind::IndicatorBox ? 0.5 * root : root;
}

SampledFunction initial_samples(InitialFunctionKind kind, const DilationMatrix& matrix, const IntBox& box) {
  (void)matrix;
  SampledFunction f;
  f.domain_box = box;
  for_each_point(box, [&](const IntVec& k) {
    double v = 1.0;
    for (auto kj : k) {
      const double x = static_cast<double>(kj);
      if (kind == InitialFunctionKind::IndicatorBox)
        v *= (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
      else
        v *= std::max(0.0, 1.0 - std::abs(x));
    }
    if (v != 0.0) f.values.emplace(k, v);
  });
  return f;
}

IntBox level_domain(const Problem& problem, double initial_radius, unsigned level, unsigned iterations) {
  const double r = bounds::level_radius(problem, initial_radius, iterations);
  const std::size_t d = problem.dim();
  IntVec half(d);
  const IntMatrix mp = power(problem.matrix.matrix(), level);
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += static_cast<double>(mp(i, j)) * static_cast<double>(mp(i, j));
    half[i] = static_cast<std::int64_t>(std::ceil(r * std::sqrt(row) * (1 + 1e-12)));
  }
  return IntBox::symmetric(half);
}

SampledFunction cascade_step(const Problem& problem, const SampledFunction& f, const IntBox& target,
                             unsigned threads) {
  const IntMatrix shift = power(problem.matrix.matrix(), f.level);
  const auto taps = refinement_taps(problem, shift);

  std::set<IntVec> targets;
  for (const auto& [k, v] : f.values) {
    if (v == 0.0) continue;
    for (const auto& tap : taps) {
      IntVec t = add(k, tap.offset);
      if (!target.contains(t))
        throw Error(ErrorCode::DomainTooSmall, "cascade step reaches outside the level domain");
      targets.insert(std::move(t));
    }
  }
  std::vector<IntVec> order(targets.begin(), targets.end());
  std::vector<double> result(order.size());
  auto lookup = [&f](const IntVec& k) { return f.at(k); };
  parallel_for(order.size(), threads,
               [&](std::size_t i) { result[i] = refinement_kernel(taps, order[i], lookup); });

  SampledFunction g;
  g.level = f.level + 1;
  g.iterations = f.iterations + 1;
  g.domain_box = target;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (result[i] != 0.0) g.values.emplace_hint(g.values.end(), std::move(order[i]), result[i]);
  return g;
}

SampledFunction cascade_step(const Problem& problem, const SampledFunction& f, double initial_radius,
                             unsigned threads) {
  return cascade_step(problem, f, level_domain(problem, initial_radius, f.level + 1, f.iterations + 1), threads);
}

SampledFunction cascade_step_on_integers(const Problem& problem, const SampledFunction& f,
                                         double initial_radius) {
  if (f.level != 0) throw Error(ErrorCode::DimensionMismatch, "integer-lattice step needs level-0 samples");
  const IntBox target = level_domain(problem, initial_radius, 0, f.iterations + 1);
  const auto& m = problem.matrix.matrix();
  const double scale = static_cast<double>(problem.m());
  SampledFunction g;
  g.level = 0;
  g.iterations = f.iterations + 1;
  g.domain_box = target;
  for_each_point(target, [&](const IntVec& p) {
    const IntVec mp = m.apply(p);
    double acc = 0.0;
    for (const auto& e : problem.mask.entries()) acc += scale * e.c * f.at(subtract(mp, e.q));
    if (acc != 0.0) g.values.emplace_hint(g.values.end(), p, acc);
  });
  return g;
}

std::vector<SampledFunction> run_cascade(const Problem& problem, InitialFunctionKind kind, unsigned levels,
                                         unsigned threads) {
  const double r0 = initial_support_radius(kind, problem.dim());
  std::vector<SampledFunction> out;
  out.push_back(initial_samples(kind, problem.matrix, level_domain(problem, r0, 0, 0)));
  for (unsigned n = 1; n <= levels; ++n) out.push_back(cascade_step(problem, out.back(), r0, threads));
  return out;
}

SampledFunction cascade_integer_values(const Problem& problem, InitialFunctionKind kind, unsigned iterations) {
  const double r0 = initial_support_radius(kind, problem.dim());
  SampledFunction f = initial_samples(kind, problem.matrix, level_domain(problem, r0, 0, 0));
  for (unsigned n = 0; n < iterations; ++n) f = cascade_step_on_integers(problem, f, r0);
  return f;
}

Eigen::MatrixXd lattice_map(const Problem& problem, unsigned level) {
  return linalg::inverse_power(problem.matrix.matrix(), level).to_dense();
}

Eigen::VectorXd coordinates(const Eigen::MatrixXd& map, const IntVec& k) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<double>(k[i]);
  return map * v;
}

RealBox empirical_support(const Problem& problem, const SampledFunction& f, double eps) {
  const Eigen::MatrixXd map = lattice_map(problem, f.level);
  RealBox box;
  for (const auto& [k, v] : f.values) {
    if (!(std::abs(v) > eps)) continue;
    const Eigen::VectorXd x = coordinates(map, k);
    if (box.empty) {
      box.empty = false;
      box.lo.assign(x.data(), x.data() + x.size());
      box.hi = box.lo;
      continue;
    }
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      box.lo[i] = std::min(box.lo[i], x(static_cast<Eigen::Index>(i)));
      box.hi[i] = std::max(box.hi[i], x(static_cast<Eigen::Index>(i)));
    }
  }
  return box;
}

double discrete_mass(const Problem& problem, const SampledFunction& f) {
  double sum = 0.0;
  for (const auto& [k, v] : f.values) sum += v;
  return sum / std::pow(static_cast<double>(problem.m()), static_cast<double>(f.level));
}

std::complex<double> m0_eval(const Mask& mask, const Eigen::VectorXd& u) {
  // Neumaier summation keeps m₀(0) = Σc_q at the correctly rounded value.
  double re = 0.0, im = 0.0, re_c = 0.0, im_c = 0.0;
  auto accumulate = [](double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  for (const auto& e : mask.entries()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < e.q.size(); ++i)
      phase += static_cast<double>(e.q[i]) * u(static_cast<Eigen::Index>(i));
    const double angle = -2.0 * std::numbers::pi * phase;
    accumulate(re, re_c, e.c * std::cos(angle));
    accumulate(im, im_c, e.c * std::sin(angle));
  }
  return {re + re_c, im + im_c};
}

std::complex<double> fourier_truncated_product(const Problem& problem, const Eigen::VectorXd& u, unsigned levels) {
  const RationalMatrix step = linalg::inverse(problem.matrix.matrix().transpose());
  RationalMatrix p = RationalMatrix::identity(problem.dim());
  std::complex<double> product = 1.0;
  for (unsigned j = 1; j <= levels; ++j) {
    p = multiply(p, step);
    product *= m0_eval(problem.mask, p.to_dense() * u);
  }
  return product;
}

}  // namespace cascade
}  // namespace scalefn
