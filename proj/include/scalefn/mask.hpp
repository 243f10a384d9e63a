#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scalefn/linalg.hpp"

namespace scalefn {

struct MaskEntry {
  IntVec q;
  double c = 0.0;
  /// Present when the coefficient was supplied as an exact rational.
  std::optional<Rational> exact;

  friend bool operator==(const MaskEntry&, const MaskEntry&) = default;
};

/// Finitely supported refinement mask {c_q}. Entries are kept sorted by q.
class Mask {
 public:
  Mask() = default;
  /// Validates: nonempty, consistent dimension, no duplicate q, Σc = 1.
  Mask(std::size_t dim, std::vector<MaskEntry> entries);

  std::size_t dim() const { return dim_; }
  const std::vector<MaskEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  /// Q = max |q| over the support.
  double radius() const { return radius_; }
  /// c_q, zero outside the support.
  double coefficient(const IntVec& q) const;
  bool all_exact() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<MaskEntry> entries_;
  double radius_ = 0.0;
};

struct Problem {
  DilationMatrix matrix;
  Mask mask;

  std::size_t dim() const { return mask.dim(); }
  std::int64_t m() const { return matrix.m(); }
};

/// Builds and validates a problem (DimensionMismatch, NotDilation).
Problem make_problem(const IntMatrix& matrix, Mask mask);

namespace mask {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kCosetTolerance = 1e-10;

/// Parses the JSON interchange document.
Problem parse_problem(std::string_view source);
Problem load_problem(const std::string& path);
std::string serialize_problem(const Problem& problem);

/// Parses "p/q", "p" or a plain decimal string into an exact rational.
std::optional<Rational> parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

double mask_radius(const Mask& mask);

struct CosetSum {
  IntVec representative;
  double sum = 0.0;
  std::optional<Rational> exact_sum;
};

struct CosetReport {
  std::vector<CosetSum> classes;
  /// Every class sums to 1/m within tolerance.
  bool balanced = false;
};

/// True when a − b lies in M·ℤᵈ (exact).
bool same_coset(const DilationMatrix& m, const IntVec& a, const IntVec& b);

CosetReport coset_sum_report(const Problem& problem);

}  // namespace mask
}  // namespace scalefn
