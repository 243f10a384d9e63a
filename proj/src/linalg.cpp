#include "scalefn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polynomial.hpp"
#include "scalefn/error.hpp"

namespace scalefn {
namespace {

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::Overflow, "integer overflow in matrix arithmetic");
  return static_cast<std::int64_t>(v);
}

std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::Overflow, "integer overflow in matrix arithmetic");
  return static_cast<std::int64_t>(v);
}

/// Orthonormal basis of the null space: right singular vectors whose singular
/// value is at most tol.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index n = a.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Orthonormal basis of the column span.
Eigen::MatrixXd column_span(const Eigen::MatrixXd& a, double tol) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0) v = -v;
}

}  // namespace

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : dim_(rows.size()), data_() {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

IntMatrix IntMatrix::identity(std::size_t dim) {
  IntMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(const IntVec& entries) {
  IntMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      if (r != c && (*this)(r, c) != 0) return false;
  return true;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::int64_t IntMatrix::trace() const {
  __int128 t = 0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return checked(t);
}

Eigen::MatrixXd IntMatrix::to_dense() const {
  Eigen::MatrixXd a(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) a(r, c) = static_cast<double>((*this)(r, c));
  return a;
}

IntVec IntMatrix::apply(const IntVec& v) const {
  IntVec out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    __int128 acc = 0;
    for (std::size_t c = 0; c < dim_; ++c) acc += static_cast<__int128>((*this)(r, c)) * v[c];
    out[r] = checked(acc);
  }
  return out;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t d = a.dim();
  IntMatrix p(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      __int128 acc = 0;
      for (std::size_t k = 0; k < d; ++k) acc += static_cast<__int128>(a(r, k)) * b(k, c);
      p(r, c) = checked(acc);
    }
  return p;
}

IntMatrix power(const IntMatrix& m, unsigned n) {
  IntMatrix result = IntMatrix::identity(m.dim());
  for (unsigned i = 0; i < n; ++i) result = multiply(result, m);
  return result;
}

// ----------------------------------------------------------- RationalMatrix

RationalMatrix::RationalMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

RationalMatrix::RationalMatrix(const IntMatrix& m) : dim_(m.dim()), data_(m.dim() * m.dim()) {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) (*this)(r, c) = Rational(m(r, c));
}

RationalMatrix RationalMatrix::identity(std::size_t dim) {
  RationalMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Eigen::MatrixXd RationalMatrix::to_dense() const {
  Eigen::MatrixXd a(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) a(r, c) = static_cast<double>((*this)(r, c));
  return a;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t d = a.dim();
  RationalMatrix p(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      Rational acc = 0;
      for (std::size_t k = 0; k < d; ++k) acc += a(r, k) * b(k, c);
      p(r, c) = acc;
    }
  return p;
}

Eigen::MatrixXd JordanStructure::jordan_matrix() const {
  Eigen::Index d = 0;
  for (const auto& b : blocks) d += static_cast<Eigen::Index>(b.size);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      const auto p = offset + static_cast<Eigen::Index>(i);
      g(p, p) = b.eigenvalue;
      if (i > 0) g(p, p - 1) = 1.0;
    }
    offset += static_cast<Eigen::Index>(b.size);
  }
  return g;
}

namespace linalg {

BigInt determinant_exact(const IntMatrix& m) {
  // Bareiss fraction-free elimination.
  const std::size_t n = m.dim();
  std::vector<BigInt> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = m(r, c);
  auto at = [&](std::size_t r, std::size_t c) -> BigInt& { return a[r * n + c]; };
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && at(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(swap, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return n == 0 ? BigInt(1) : sign * at(n - 1, n - 1);
}

std::int64_t determinant(const IntMatrix& m) { return to_int64(determinant_exact(m)); }

RationalMatrix inverse(const IntMatrix& m) {
  const std::size_t n = m.dim();
  RationalMatrix a(m);
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw Error(ErrorCode::SingularMatrix, "matrix is singular");
    if (pivot != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(col, c), a(pivot, c));
        std::swap(inv(col, c), inv(pivot, c));
      }
    const Rational p = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      const Rational f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double operator_norm(const IntMatrix& m) { return operator_norm(m.to_dense()); }
double operator_norm(const RationalMatrix& m) { return operator_norm(m.to_dense()); }

std::vector<BigInt> characteristic_polynomial(const IntMatrix& m) {
  // Faddeev–LeVerrier; every division by k is exact over the integers.
  const std::size_t n = m.dim();
  std::vector<BigInt> coeff(n + 1);
  coeff[n] = 1;
  std::vector<BigInt> mk(n * n, 0);  // M_0 = 0
  std::vector<BigInt> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = m(r, c);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<BigInt> next(n * n, 0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        BigInt acc = 0;
        for (std::size_t t = 0; t < n; ++t) acc += a[r * n + t] * mk[t * n + c];
        next[r * n + c] = acc;
      }
    for (std::size_t i = 0; i < n; ++i) next[i * n + i] += coeff[n - k + 1];
    BigInt tr = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t t = 0; t < n; ++t) tr += a[r * n + t] * next[t * n + r];
    coeff[n - k] = -tr / static_cast<long>(k);
    mk = std::move(next);
  }
  return coeff;
}

Spectrum eigenvalues(const IntMatrix& m) {
  const auto p = poly::from_integers(characteristic_polynomial(m));
  Spectrum s;
  for (const auto& factor : poly::squarefree_factorization(p)) {
    for (auto root : poly::roots_squarefree(factor.poly)) {
      if (std::abs(root.imag()) <= kRealTolerance * std::max(1.0, std::abs(root)))
        root = {root.real(), 0.0};
      s.distinct.push_back({root, factor.multiplicity});
    }
  }
  auto order = [](const Eigenvalue& a, const Eigenvalue& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  };
  std::sort(s.distinct.begin(), s.distinct.end(), order);

  // Merge numerically indistinguishable roots.
  std::vector<Eigenvalue> merged;
  for (const auto& e : s.distinct) {
    if (!merged.empty()) {
      auto& last = merged.back();
      const double scale = std::max(1.0, std::abs(last.value));
      if (std::abs(last.value - e.value) <= kClusterTolerance * scale) {
        const double wa = last.multiplicity, wb = e.multiplicity;
        last.value = (last.value * wa + e.value * wb) / (wa + wb);
        last.multiplicity += e.multiplicity;
        continue;
      }
    }
    merged.push_back(e);
  }
  s.distinct = std::move(merged);

  s.all_real = true;
  for (const auto& e : s.distinct) {
    if (e.value.imag() != 0.0) s.all_real = false;
    for (unsigned i = 0; i < e.multiplicity; ++i) s.eigenvalues.push_back(e.value);
  }
  return s;
}

DilationReport is_dilation(const IntMatrix& m) {
  DilationReport report;
  report.determinant = determinant(m);
  if (report.determinant == 0) {
    report.message = "determinant is zero";
    return report;
  }
  const Spectrum s = eigenvalues(m);
  for (const auto& e : s.eigenvalues)
    if (std::abs(e) <= 1.0 + kDilationTolerance) report.offending.push_back(e);
  report.is_dilation = report.offending.empty();
  report.message = report.is_dilation ? "all eigenvalue moduli exceed 1"
                                      : "eigenvalue with modulus <= 1";
  return report;
}

RationalMatrix inverse_power(const IntMatrix& m, unsigned n) {
  RationalMatrix base = inverse(m);
  RationalMatrix result = RationalMatrix::identity(m.dim());
  while (n > 0) {
    if (n & 1u) result = multiply(result, base);
    n >>= 1u;
    if (n > 0) base = multiply(base, base);
  }
  return result;
}

double power_inverse_norm(const IntMatrix& m, unsigned n) {
  return operator_norm(inverse_power(m, n));
}

std::optional<unsigned> first_contractive_power(const IntMatrix& m, unsigned cap) {
  const RationalMatrix inv = inverse(m);
  RationalMatrix p = inv;
  for (unsigned k = 1; k <= cap; ++k) {
    if (operator_norm(p) < 1.0) return k;
    p = multiply(p, inv);
  }
  return std::nullopt;
}

std::size_t numerical_rank(const Eigen::MatrixXd& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return rank;
}

JordanStructure real_jordan_structure(const IntMatrix& m) {
  const Spectrum spectrum = eigenvalues(m);
  if (!spectrum.all_real)
    throw Error(ErrorCode::ComplexSpectrum, "matrix has non-real eigenvalues");
  const auto d = static_cast<Eigen::Index>(m.dim());
  JordanStructure js;

  if (m.is_diagonal()) {
    // Already in Jordan form; keep coordinates in place.
    for (std::size_t i = 0; i < m.dim(); ++i)
      js.blocks.push_back({static_cast<double>(m(i, i)), 1});
    js.transform = Eigen::MatrixXd::Identity(d, d);
    js.transform_inverse = Eigen::MatrixXd::Identity(d, d);
    js.condition_number = 1.0;
    return js;
  }

  const Eigen::MatrixXd dense = m.to_dense();
  std::vector<Eigen::VectorXd> columns;

  for (const auto& e : spectrum.distinct) {
    const double lambda = e.value.real();
    const auto alg = static_cast<std::size_t>(e.multiplicity);
    const Eigen::MatrixXd a = dense - lambda * Eigen::MatrixXd::Identity(d, d);
    const double norm_a = std::max(operator_norm(a), std::numeric_limits<double>::min());

    // Powers A^k and their ranks, k = 0..alg+1.
    std::vector<Eigen::MatrixXd> powers{Eigen::MatrixXd::Identity(d, d)};
    std::vector<std::size_t> ranks{static_cast<std::size_t>(d)};
    std::vector<double> tols{0.0};
    for (std::size_t k = 1; k <= alg + 1; ++k) {
      powers.push_back(powers.back() * a);
      tols.push_back(kRankTolerance * std::pow(norm_a, static_cast<double>(k)));
      ranks.push_back(numerical_rank(powers.back(), tols.back()));
    }
    const std::size_t target = static_cast<std::size_t>(d) - alg;
    std::size_t index = 0;
    while (index <= alg && ranks[index] != target) ++index;
    if (index > alg)
      throw Error(ErrorCode::IllConditionedTransform,
                  "rank sequence of (M - lambda I)^k does not match the algebraic multiplicity");

    // Chains (head, size), longest first.
    std::vector<std::pair<Eigen::VectorXd, std::size_t>> chains;
    for (std::size_t s = index; s >= 1; --s) {
      const auto r_prev = static_cast<long>(ranks[s - 1]);
      const auto r_s = static_cast<long>(ranks[s]);
      const auto r_next = static_cast<long>(ranks[s + 1]);
      const long count = (r_prev - r_s) - (r_s - r_next);
      if (count <= 0) continue;

      Eigen::MatrixXd covered(d, 0);
      if (s > 1) covered = null_space(powers[s - 1], tols[s - 1]);
      for (const auto& [head, size] : chains) {
        covered.conservativeResize(d, covered.cols() + 1);
        covered.col(covered.cols() - 1) = powers[size - s] * head;
      }
      const Eigen::MatrixXd basis_covered = column_span(covered, 1e-9);
      const Eigen::MatrixXd kernel = null_space(powers[s], tols[s]);
      const Eigen::MatrixXd projector =
          Eigen::MatrixXd::Identity(d, d) - basis_covered * basis_covered.transpose();
      const Eigen::MatrixXd candidates = projector * kernel;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(candidates, Eigen::ComputeFullU);
      if (svd.singularValues().size() < count ||
          svd.singularValues()(count - 1) <= 1e-9)
        throw Error(ErrorCode::IllConditionedTransform, "could not extend Jordan chains");
      for (long i = 0; i < count; ++i) {
        Eigen::VectorXd head = svd.matrixU().col(i);
        fix_sign(head);
        chains.emplace_back(head, s);
      }
    }
    for (const auto& [head, size] : chains) {
      js.blocks.push_back({lambda, size});
      Eigen::VectorXd v = head;
      for (std::size_t i = 0; i < size; ++i) {
        columns.push_back(v);
        v = a * v;
      }
    }
  }

  js.transform.resize(d, d);
  for (Eigen::Index c = 0; c < d; ++c) js.transform.col(c) = columns[static_cast<std::size_t>(c)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js.transform);
  const auto& sv = svd.singularValues();
  js.condition_number = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!(js.condition_number <= kMaxCondition))
    throw Error(ErrorCode::IllConditionedTransform, "Jordan transform is ill-conditioned");
  js.transform_inverse = js.transform.inverse();

  const Eigen::MatrixXd rebuilt = js.transform * js.jordan_matrix() * js.transform_inverse;
  const double err = (rebuilt - dense).cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = dense.cwiseAbs().rowwise().sum().maxCoeff();
  if (err > kReconstructionTolerance * scale)
    throw Error(ErrorCode::IllConditionedTransform, "Jordan reconstruction check failed");
  return js;
}

}  // namespace linalg

DilationMatrix DilationMatrix::create(const IntMatrix& m) {
  if (m.dim() == 0 || m.dim() > kMaxDimension)
    throw Error(ErrorCode::DimensionMismatch, "matrix dimension must be between 1 and 8");
  DilationMatrix dm;
  dm.matrix_ = m;
  dm.det_ = linalg::determinant(m);
  if (dm.det_ == 0) throw Error(ErrorCode::NotDilation, "matrix is singular");
  dm.spectrum_ = linalg::eigenvalues(m);
  for (const auto& e : dm.spectrum_.eigenvalues)
    if (std::abs(e) <= 1.0 + linalg::kDilationTolerance)
      throw Error(ErrorCode::NotDilation, "matrix has an eigenvalue of modulus <= 1");
  dm.inverse_ = linalg::inverse(m);
  dm.norm_ = linalg::operator_norm(m);
  dm.inverse_norm_ = linalg::operator_norm(dm.inverse_);
  return dm;
}

}  // namespace scalefn
