#include "scalefn/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <limits>
#include <mutex>
#include <thread>

#include "scalefn/cascade.hpp"
#include "scalefn/error.hpp"
#include "scalefn/table_io.hpp"

namespace scalefn::pointwise {
namespace {

/// Row-reduces the basis (columns of v) so that each vector has a unit entry
/// at its own pivot and zeros at the other pivots.
std::vector<Eigen::VectorXd> reduced_basis(const Eigen::MatrixXd& v, double zero) {
  Eigen::MatrixXd r = v.transpose();
  const Eigen::Index rows = r.rows(), cols = r.cols();
  Eigen::Index lead = 0;
  for (Eigen::Index c = 0; c < cols && lead < rows; ++c) {
    Eigen::Index pivot = lead;
    r.col(c).segment(lead, rows - lead).cwiseAbs().maxCoeff(&pivot);
    pivot += lead;
    if (std::abs(r(pivot, c)) <= 1e-9) continue;
    r.row(lead).swap(r.row(pivot));
    r.row(lead) /= r(lead, c);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (i != lead) r.row(i) -= r(i, c) * r.row(lead);
    ++lead;
  }
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    Eigen::VectorXd row = r.row(i).transpose();
    for (auto& x : row)
      if (std::abs(x) <= zero) x = 0.0;
    out.push_back(row);
  }
  return out;
}

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

/// Index box containing every k with M^{-level}k in the region.
IntBox level_index_box(const Problem& problem, const SupportBound& region, unsigned level) {
  const auto ext = bounds::coordinate_extent(region);
  const IntMatrix mp = power(problem.matrix.matrix(), level);
  const std::size_t d = problem.dim();
  IntVec half(d);
  for (std::size_t i = 0; i < d; ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < d; ++j) h += std::abs(static_cast<double>(mp(i, j))) * ext[j];
    half[i] = static_cast<std::int64_t>(std::ceil(h * (1 + 1e-12) + 1e-12));
  }
  return IntBox::symmetric(half);
}

}  // namespace

std::vector<IntVec> candidate_points(const SupportBound& bound) {
  std::vector<IntVec> points;
  for_each_point(bounds::enclosing_integer_box(bound), [&](const IntVec& k) {
    if (bound.contains(cascade::coordinates(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k.size()),
                                                                       static_cast<Eigen::Index>(k.size())),
                                            k)))
      points.push_back(k);
  });
  return points;
}

std::vector<IntVec> candidate_points(const Problem& problem) {
  return candidate_points(bounds::best_bound(problem));
}

TransferMatrix build_transfer_matrix(const Problem& problem, const std::vector<IntVec>& points) {
  TransferMatrix b;
  b.points = points;
  const auto n = static_cast<Eigen::Index>(points.size());
  b.entries = Eigen::MatrixXd::Zero(n, n);
  const double m = static_cast<double>(problem.m());
  const auto& mat = problem.matrix.matrix();
  for (Eigen::Index i = 0; i < n; ++i) {
    const IntVec mk = mat.apply(points[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j)
      b.entries(i, j) = m * problem.mask.coefficient(subtract(mk, points[static_cast<std::size_t>(j)]));
  }
  return b;
}

IntegerValues integer_values(const TransferMatrix& b, double unit_tolerance, double zero_threshold) {
  IntegerValues out;
  out.points = b.points;
  const Eigen::Index n = b.entries.rows();

  Eigen::EigenSolver<Eigen::MatrixXd> eig(b.entries, false);
  double closest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    out.spectrum.push_back(eig.eigenvalues()(i));
    closest = std::min(closest, std::abs(eig.eigenvalues()(i) - 1.0));
  }
  std::sort(out.spectrum.begin(), out.spectrum.end(), [](auto a, auto c) {
    if (std::abs(a) != std::abs(c)) return std::abs(a) > std::abs(c);
    if (a.real() != c.real()) return a.real() > c.real();
    return a.imag() > c.imag();
  });

  const Eigen::MatrixXd shifted = b.entries - Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index nullity = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= unit_tolerance * scale) ++nullity;
  if (nullity == 0 && !(closest <= unit_tolerance))
    throw Error(ErrorCode::NoUnitEigenvalue, "transfer matrix has no eigenvalue 1");
  nullity = std::max<Eigen::Index>(nullity, 1);
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(nullity);
  out.eigenspace_dimension = static_cast<std::size_t>(nullity);
  out.structural_zero.assign(static_cast<std::size_t>(n), false);

  if (nullity == 1) {
    Eigen::VectorXd v = kernel.col(0);
    const double sum = v.sum();
    if (std::abs(sum) <= kNormalizationTolerance)
      throw Error(ErrorCode::NormalizationImpossible, "eigenvector entries sum to zero");
    v /= sum;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(v(i)) <= zero_threshold) {
        v(i) = 0.0;
        out.structural_zero[static_cast<std::size_t>(i)] = true;
      }
    v /= v.sum();
    out.basis.push_back(v);
  } else {
    out.non_unique = true;
    out.basis = reduced_basis(kernel, zero_threshold);
    for (Eigen::Index i = 0; i < n; ++i) {
      bool zero = true;
      for (const auto& v : out.basis) zero = zero && v(i) == 0.0;
      out.structural_zero[static_cast<std::size_t>(i)] = zero;
    }
  }
  for (const auto& v : out.basis) {
    const double norm = v.cwiseAbs().maxCoeff();
    if (norm > 0) out.residual = std::max(out.residual, (b.entries * v - v).cwiseAbs().maxCoeff() / norm);
  }
  return out;
}

LatticeValues level0_values(const IntegerValues& values, bool left_closed) {
  const Eigen::VectorXd* chosen = nullptr;
  if (values.basis.size() == 1) {
    chosen = &values.basis.front();
  } else if (left_closed && !values.basis.empty()) {
    // Reduced basis vectors are ordered by pivot position, so the first one
    // leads at the lexicographically first point.
    chosen = &values.basis.front();
  } else {
    throw Error(ErrorCode::NormalizationImpossible,
                "eigenvalue-1 eigenspace is not one-dimensional; no unique normalization");
  }
  Eigen::VectorXd v = *chosen;
  const double sum = v.sum();
  if (std::abs(sum) <= kNormalizationTolerance)
    throw Error(ErrorCode::NormalizationImpossible, "chosen eigenvector entries sum to zero");
  if (values.basis.size() > 1) v /= sum;
  LatticeValues out;
  for (std::size_t i = 0; i < values.points.size(); ++i) out.emplace(values.points[i], v(static_cast<Eigen::Index>(i)));
  return out;
}

ValueTable refine_values(const Problem& problem, const SupportBound& region, const LatticeValues& level0,
                         unsigned levels, unsigned threads) {
  ValueTable table;
  table.levels[0] = level0;
  double sum0 = 0.0;
  for (const auto& [k, v] : level0) sum0 += v;
  table.normalized = std::abs(sum0 - 1.0) <= 1e-12;

  Eigen::MatrixXd prev_map = cascade::lattice_map(problem, 0);
  for (unsigned j = 1; j <= levels; ++j) {
    const Eigen::MatrixXd map = cascade::lattice_map(problem, j);
    std::vector<IntVec> targets;
    for_each_point(level_index_box(problem, region, j), [&](const IntVec& k) {
      if (region.contains(cascade::coordinates(map, k))) targets.push_back(k);
    });
    const auto taps = refinement_taps(problem, power(problem.matrix.matrix(), j - 1));
    const LatticeValues& prev = table.levels.at(j - 1);
    auto lookup = [&](const IntVec& k) {
      auto it = prev.find(k);
      if (it != prev.end()) return it->second;
      if (region.contains(cascade::coordinates(prev_map, k)))
        throw Error(ErrorCode::DomainTooSmall, "refinement needs a value inside the bound that was not computed");
      return 0.0;
    };
    std::vector<double> result(targets.size());
    std::exception_ptr failure;
    std::mutex failure_lock;
    parallel_for(targets.size(), threads, [&](std::size_t i) {
      try {
        result[i] = refinement_kernel(taps, targets[i], lookup);
      } catch (...) {
        std::lock_guard guard(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);
    LatticeValues& level = table.levels[j];
    for (std::size_t i = 0; i < targets.size(); ++i)
      level.emplace_hint(level.end(), std::move(targets[i]), result[i]);
    prev_map = map;
  }
  return table;
}

ValueTable refine_values(const Problem& problem, const LatticeValues& level0, unsigned levels, unsigned threads) {
  return refine_values(problem, bounds::best_bound(problem), level0, levels, threads);
}

std::vector<PeriodizationDeviation> periodization_check(const Problem& problem, const SupportBound& region,
                                                        const ValueTable& table, unsigned level,
                                                        const std::vector<IntVec>& probes) {
  const auto& values = table.levels.at(level);
  const Eigen::MatrixXd map = cascade::lattice_map(problem, level);
  const IntMatrix mp = power(problem.matrix.matrix(), level);
  const auto ext = bounds::coordinate_extent(region);
  std::vector<PeriodizationDeviation> out;
  for (const auto& p : probes) {
    const Eigen::VectorXd x = cascade::coordinates(map, p);
    IntBox shifts;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double xi = x(static_cast<Eigen::Index>(i));
      shifts.lo.push_back(static_cast<std::int64_t>(std::floor(-ext[i] - xi)) - 1);
      shifts.hi.push_back(static_cast<std::int64_t>(std::ceil(ext[i] - xi)) + 1);
    }
    double sum = 0.0;
    for_each_point(shifts, [&](const IntVec& n) {
      auto it = values.find(add(p, mp.apply(n)));
      if (it != values.end()) sum += it->second;
    });
    out.push_back({p, sum, std::abs(sum - 1.0)});
  }
  return out;
}

std::string export_values(const Problem& problem, const ValueTable& table) {
  std::ostringstream os;
  os << table_io::header(problem.dim()) << '\n';
  for (const auto& [level, values] : table.levels)
    table_io::write_level(os, level, values, cascade::lattice_map(problem, level));
  return os.str();
}

ValueTable parse_values(std::string_view text, std::size_t dim) {
  ValueTable table;
  table.levels = table_io::parse(text, dim);
  if (auto it = table.levels.find(0); it != table.levels.end()) {
    double sum = 0.0;
    for (const auto& [k, v] : it->second) sum += v;
    table.normalized = std::abs(sum - 1.0) <= 1e-12;
  }
  return table;
}

}  // namespace scalefn::pointwise
