#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace scalefn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVec = std::vector<std::int64_t>;

/// Largest supported dimension; the algorithms below are dense.
inline constexpr std::size_t kMaxDimension = 8;

/// Square integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t dim);
  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  static IntMatrix identity(std::size_t dim);
  static IntMatrix diagonal(const IntVec& entries);

  std::size_t dim() const { return dim_; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }

  bool is_diagonal() const;
  IntMatrix transpose() const;
  std::int64_t trace() const;
  Eigen::MatrixXd to_dense() const;

  /// M·v with overflow detection (throws Overflow).
  IntVec apply(const IntVec& v) const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::int64_t> data_;
};

/// Overflow-checked product and power of integer matrices.
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix power(const IntMatrix& m, unsigned n);

class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t dim);
  explicit RationalMatrix(const IntMatrix& m);

  static RationalMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }

  RationalMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Rational> data_;
};

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);

struct Eigenvalue {
  std::complex<double> value;
  unsigned multiplicity = 1;
};

struct Spectrum {
  /// All d eigenvalues with repetition, sorted by descending real part then
  /// descending imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  /// Distinct eigenvalues with algebraic multiplicities (exact, from a
  /// square-free factorization of the characteristic polynomial).
  std::vector<Eigenvalue> distinct;
  bool all_real = false;
};

struct JordanBlock {
  double eigenvalue = 0.0;
  std::size_t size = 0;
};

/// M = C·G·C⁻¹ where G is block diagonal; each block carries its eigenvalue
/// on the diagonal and ones on the subdiagonal.
struct JordanStructure {
  std::vector<JordanBlock> blocks;
  Eigen::MatrixXd transform;
  Eigen::MatrixXd transform_inverse;
  double condition_number = 1.0;

  Eigen::MatrixXd jordan_matrix() const;
};

struct DilationReport {
  bool is_dilation = false;
  std::int64_t determinant = 0;
  std::vector<std::complex<double>> offending;  // eigenvalues with modulus ≤ 1 + tol
  std::string message;
};

namespace linalg {

inline constexpr double kRealTolerance = 1e-8;
inline constexpr double kClusterTolerance = 1e-6;
inline constexpr double kDilationTolerance = 1e-8;
inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kReconstructionTolerance = 1e-8;
inline constexpr double kMaxCondition = 1e8;
inline constexpr unsigned kContractionSearchCap = 64;

std::int64_t determinant(const IntMatrix& m);
BigInt determinant_exact(const IntMatrix& m);

/// Exact inverse; throws SingularMatrix.
RationalMatrix inverse(const IntMatrix& m);

/// Largest singular value, via the symmetric eigenproblem of A·Aᵀ.
double operator_norm(const Eigen::MatrixXd& a);
double operator_norm(const IntMatrix& m);
double operator_norm(const RationalMatrix& m);

/// Coefficients of det(λI − M), lowest degree first, exact.
std::vector<BigInt> characteristic_polynomial(const IntMatrix& m);

Spectrum eigenvalues(const IntMatrix& m);

DilationReport is_dilation(const IntMatrix& m);

/// Exact M⁻ⁿ.
RationalMatrix inverse_power(const IntMatrix& m, unsigned n);
double power_inverse_norm(const IntMatrix& m, unsigned n);

/// Smallest n ≤ cap with ‖M⁻ⁿ‖ < 1, if any.
std::optional<unsigned> first_contractive_power(const IntMatrix& m,
                                                unsigned cap = kContractionSearchCap);

JordanStructure real_jordan_structure(const IntMatrix& m);

/// Numerical rank with singular values above tol counted.
std::size_t numerical_rank(const Eigen::MatrixXd& a, double tol);

}  // namespace linalg

/// A validated dilation matrix with its analytics computed once.
class DilationMatrix {
 public:
  /// Throws NotDilation (or SingularMatrix) when the matrix does not qualify.
  static DilationMatrix create(const IntMatrix& m);

  const IntMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }
  std::int64_t determinant() const { return det_; }
  /// m = |det M|.
  std::int64_t m() const { return det_ < 0 ? -det_ : det_; }
  const RationalMatrix& inverse() const { return inverse_; }
  const Spectrum& spectrum() const { return spectrum_; }
  double norm() const { return norm_; }
  double inverse_norm() const { return inverse_norm_; }

 private:
  IntMatrix matrix_;
  std::int64_t det_ = 0;
  RationalMatrix inverse_;
  Spectrum spectrum_;
  double norm_ = 0.0;
  double inverse_norm_ = 0.0;
};

}  // namespace scalefn
