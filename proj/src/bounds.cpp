#include "scalefn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scalefn {
namespace {

constexpr double kSlack = 1e-12;
// |λ| = 2 switches the Jordan closed form to Q·k.
constexpr double kTwoTolerance = 1e-12;

double geometric_sum(double ratio, unsigned n) {
  double sum = 0.0, term = 1.0;
  for (unsigned i = 1; i <= n; ++i) {
    term *= ratio;
    sum += term;
  }
  return sum;
}

long ceil_integer(double x) {
  // Integer points cannot lie strictly between an integer and x when x exceeds
  // it by rounding noise only.
  return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace

bool SupportBound::contains(const Eigen::VectorXd& x) const {
  switch (kind) {
    case BoundKind::Ball:
      return x.norm() <= radius * (1 + kSlack) + kSlack;
    case BoundKind::Box:
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x(i)) > half_widths[static_cast<std::size_t>(i)] * (1 + kSlack) + kSlack) return false;
      return true;
    case BoundKind::TransformedBox: {
      const Eigen::VectorXd t = transform_inverse * x;
      for (Eigen::Index i = 0; i < t.size(); ++i)
        if (std::abs(t(i)) > half_widths[static_cast<std::size_t>(i)] * (1 + kSlack) + kSlack) return false;
      return true;
    }
  }
  return false;
}

namespace bounds {

SupportBound ball_bound(const Problem& problem) {
  const double r = problem.matrix.inverse_norm();
  if (!(r < 1.0)) {
    std::ostringstream os;
    os << "||M^-1|| = " << r << " is not below 1";
    throw Error(ErrorCode::NormNotContractive, os.str());
  }
  SupportBound b;
  b.kind = BoundKind::Ball;
  b.dim = problem.dim();
  b.radius = problem.mask.radius() * r / (1.0 - r);
  b.provenance = "norm ball Q||M^-1||/(1-||M^-1||)";
  return b;
}

double finite_level_ball(const Problem& problem, double initial_radius, unsigned n) {
  const double r = problem.matrix.inverse_norm();
  if (!(r < 1.0)) throw Error(ErrorCode::NormNotContractive, "||M^-1|| is not below 1");
  return std::pow(r, static_cast<double>(n)) * initial_radius + problem.mask.radius() * geometric_sum(r, n);
}

double level_radius(const Problem& problem, double initial_radius, unsigned n) {
  const auto& inv = problem.matrix.inverse();
  RationalMatrix p = RationalMatrix::identity(problem.dim());
  double sum = 0.0, last = 1.0;
  for (unsigned i = 1; i <= n; ++i) {
    p = multiply(p, inv);
    last = linalg::operator_norm(p);
    sum += last;
  }
  return last * initial_radius + problem.mask.radius() * sum;
}

unsigned contraction_block(const Problem& problem) {
  if (problem.matrix.inverse_norm() < 1.0) return 1;
  auto k = linalg::first_contractive_power(problem.matrix.matrix());
  if (!k)
    throw Error(ErrorCode::ContractionSearchExhausted,
                "no power k <= 64 with ||M^-k|| < 1");
  return *k;
}

SupportBound general_ball_bound(const Problem& problem) {
  const unsigned k = contraction_block(problem);
  double sum = 0.0, last = 0.0;
  if (k == 1) {
    last = sum = problem.matrix.inverse_norm();
  } else {
    const auto& inv = problem.matrix.inverse();
    RationalMatrix p = RationalMatrix::identity(problem.dim());
    for (unsigned i = 1; i <= k; ++i) {
      p = multiply(p, inv);
      last = linalg::operator_norm(p);
      sum += last;
    }
  }
  SupportBound b;
  b.kind = BoundKind::Ball;
  b.dim = problem.dim();
  b.radius = problem.mask.radius() * sum / (1.0 - last);
  b.provenance = "general ball, k = " + std::to_string(k) + " step contraction";
  return b;
}

double bound_1d(std::int64_t m, double q) {
  const auto am = m < 0 ? -m : m;
  if (am <= 1) throw Error(ErrorCode::NotDilation1D, "|m| must exceed 1");
  return q / static_cast<double>(am - 1);
}

SupportBound diagonal_bound(const Problem& problem) {
  const auto& m = problem.matrix.matrix();
  if (!m.is_diagonal()) throw Error(ErrorCode::NotDiagonal, "matrix is not diagonal");
  SupportBound b;
  b.kind = BoundKind::Box;
  b.dim = m.dim();
  const double q = problem.mask.radius();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const auto lambda = std::abs(m(i, i));
    if (lambda <= 1) throw Error(ErrorCode::NotDilationEigenvalue, "diagonal entry with |lambda| <= 1");
    b.half_widths.push_back(q / static_cast<double>(lambda - 1));
  }
  b.provenance = "diagonal corollary Q/(|lambda_k|-1)";
  return b;
}

std::vector<double> jordan_block_bound(double lambda, std::size_t s, double q) {
  const double a = std::abs(lambda);
  if (!(a > 1.0)) throw Error(ErrorCode::NotDilationEigenvalue, "|lambda| must exceed 1");
  std::vector<double> out;
  out.reserve(s);
  for (std::size_t k = 1; k <= s; ++k) {
    if (std::abs(a - 2.0) <= kTwoTolerance)
      out.push_back(q * static_cast<double>(k));
    else
      out.push_back(q / (a - 2.0) * (1.0 - 1.0 / std::pow(a - 1.0, static_cast<double>(k))));
  }
  return out;
}

std::vector<std::vector<double>> jordan_recurrence_table(double lambda, std::size_t s, double q,
                                                         double initial_radius, unsigned n_max) {
  const double a = std::abs(lambda);
  if (!(a > 1.0)) throw Error(ErrorCode::NotDilationEigenvalue, "|lambda| must exceed 1");
  std::vector<std::vector<double>> table(n_max, std::vector<double>(s, 0.0));
  if (n_max == 0 || s == 0) return table;
  // Row n = 1: (Q + R)(1/|λ| + … + 1/|λ|^k).
  for (std::size_t k = 1; k <= s; ++k)
    table[0][k - 1] = (q + initial_radius) * geometric_sum(1.0 / a, static_cast<unsigned>(k));
  for (unsigned n = 2; n <= n_max; ++n) {
    // Column k = 1: R/|λ|ⁿ + Q(1/|λ| + … + 1/|λ|ⁿ).
    table[n - 1][0] = initial_radius / std::pow(a, static_cast<double>(n)) + q * geometric_sum(1.0 / a, n);
    for (std::size_t k = 2; k <= s; ++k)
      table[n - 1][k - 1] = (q + table[n - 2][k - 1] + table[n - 1][k - 2]) / a;
  }
  return table;
}

double transformed_mask_radius(const Problem& problem, const Eigen::MatrixXd& transform_inverse) {
  double r = 0.0;
  for (const auto& e : problem.mask.entries()) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(e.q.size()));
    for (std::size_t i = 0; i < e.q.size(); ++i) q(static_cast<Eigen::Index>(i)) = static_cast<double>(e.q[i]);
    r = std::max(r, (transform_inverse * q).norm());
  }
  return r;
}

SupportBound parallelepiped_bound(const Problem& problem) {
  const JordanStructure js = linalg::real_jordan_structure(problem.matrix.matrix());
  const double q_prime = transformed_mask_radius(problem, js.transform_inverse);
  SupportBound b;
  b.kind = BoundKind::TransformedBox;
  b.dim = problem.dim();
  b.transform = js.transform;
  b.transform_inverse = js.transform_inverse;
  for (const auto& block : js.blocks) {
    const auto widths = jordan_block_bound(block.eigenvalue, block.size, q_prime);
    b.half_widths.insert(b.half_widths.end(), widths.begin(), widths.end());
  }
  std::ostringstream os;
  os.precision(17);
  os << "Jordan parallelepiped C*P with Q' = max|C^-1 q| = " << q_prime;
  b.provenance = os.str();
  return b;
}

std::vector<double> coordinate_extent(const SupportBound& bound) {
  std::vector<double> ext(bound.dim, 0.0);
  switch (bound.kind) {
    case BoundKind::Ball:
      std::fill(ext.begin(), ext.end(), bound.radius);
      break;
    case BoundKind::Box:
      ext = bound.half_widths;
      break;
    case BoundKind::TransformedBox:
      // A vertex ±h of P maps to Σ ±h_j C_{ij}; the extreme over the signs
      // is Σ |C_{ij}| h_j.
      for (std::size_t i = 0; i < bound.dim; ++i)
        for (std::size_t j = 0; j < bound.dim; ++j)
          ext[i] += std::abs(bound.transform(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
                    bound.half_widths[j];
      break;
  }
  return ext;
}

IntBox enclosing_integer_box(const SupportBound& bound) {
  IntVec half;
  for (double e : coordinate_extent(bound)) half.push_back(ceil_integer(e));
  return IntBox::symmetric(half);
}

SupportBound best_bound(const Problem& problem) {
  try {
    if (problem.matrix.inverse_norm() < 1.0) return ball_bound(problem);
    if (problem.matrix.spectrum().all_real) {
      try {
        return parallelepiped_bound(problem);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::IllConditionedTransform && e.code() != ErrorCode::ComplexSpectrum) throw;
      }
    }
    return general_ball_bound(problem);
  } catch (const Error& e) {
    throw Error(ErrorCode::NoBoundAvailable, std::string("no support bound: ") + e.what());
  }
}

std::vector<BoundAttempt> all_bounds(const Problem& problem) {
  std::vector<BoundAttempt> out;
  auto attempt = [&](std::string name, auto&& fn) {
    BoundAttempt a{std::move(name), std::nullopt, std::nullopt};
    try {
      a.bound = fn();
    } catch (const Error& e) {
      a.error = e;
    }
    out.push_back(std::move(a));
  };
  if (problem.dim() == 1) {
    attempt("corollary d=1", [&] {
      SupportBound b;
      b.kind = BoundKind::Box;
      b.dim = 1;
      b.half_widths = {bound_1d(problem.matrix.determinant(), problem.mask.radius())};
      b.provenance = "one-dimensional corollary Q/(|m|-1)";
      return b;
    });
  }
  attempt("norm ball", [&] { return ball_bound(problem); });
  attempt("general ball", [&] { return general_ball_bound(problem); });
  attempt("diagonal", [&] { return diagonal_bound(problem); });
  attempt("parallelepiped", [&] { return parallelepiped_bound(problem); });
  return out;
}

}  // namespace bounds
}  // namespace scalefn
