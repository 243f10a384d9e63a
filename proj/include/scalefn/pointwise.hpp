#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalefn/bounds.hpp"
#include "scalefn/lattice.hpp"
#include "scalefn/mask.hpp"

namespace scalefn {

/// B[i][j] = m·c_{M k_i − k_j} over an ordered point list.
struct TransferMatrix {
  std::vector<IntVec> points;
  Eigen::MatrixXd entries;
};

struct IntegerValues {
  std::vector<IntVec> points;
  /// One vector (normalized to sum 1) when the eigenspace is one-dimensional;
  /// otherwise a reduced-row-echelon basis, unnormalized.
  std::vector<Eigen::VectorXd> basis;
  std::size_t eigenspace_dimension = 0;
  bool non_unique = false;
  /// Entries forced to zero because their magnitude was below the threshold.
  std::vector<bool> structural_zero;
  std::vector<std::complex<double>> spectrum;
  /// max over basis vectors of ‖B·r − r‖∞ / ‖r‖∞.
  double residual = 0.0;
};

/// φ(M^{-j}k) for j = 0..J.
struct ValueTable {
  std::map<unsigned, LatticeValues> levels;
  bool normalized = false;
};

struct PeriodizationDeviation {
  IntVec probe;
  double sum = 0.0;
  double deviation = 0.0;
};

namespace pointwise {

inline constexpr double kUnitEigenTolerance = 1e-9;
inline constexpr double kStructuralZero = 1e-10;
inline constexpr double kNormalizationTolerance = 1e-12;

/// All integer points inside the bound, lexicographic.
std::vector<IntVec> candidate_points(const SupportBound& bound);
/// Same with bounds::best_bound. Throws NoBoundAvailable.
std::vector<IntVec> candidate_points(const Problem& problem);

TransferMatrix build_transfer_matrix(const Problem& problem, const std::vector<IntVec>& points);

/// Eigenvalue-1 eigenspace of B. Throws NoUnitEigenvalue, NormalizationImpossible.
IntegerValues integer_values(const TransferMatrix& b, double unit_tolerance = kUnitEigenTolerance,
                             double zero_threshold = kStructuralZero);

/// The single normalized vector as a point → value map. For a non-unique
/// eigenspace, picks the basis vector whose leading point is lexicographically
/// first (the left-closed convention) when `left_closed` is set, and throws
/// NormalizationImpossible otherwise.
LatticeValues level0_values(const IntegerValues& values, bool left_closed = false);

/// V_j(k) = m·Σ c_q·V_{j−1}(k − M^{j−1}q), stored for every k with M^{-j}k in
/// the region. Throws DomainTooSmall when a needed in-region value is missing.
ValueTable refine_values(const Problem& problem, const SupportBound& region, const LatticeValues& level0,
                         unsigned levels, unsigned threads = 1);
ValueTable refine_values(const Problem& problem, const LatticeValues& level0, unsigned levels,
                         unsigned threads = 1);

/// Σ_{n∈ℤᵈ} φ(x + n) for probes x = M^{-j}p given by their level-j indices p.
std::vector<PeriodizationDeviation> periodization_check(const Problem& problem, const SupportBound& region,
                                                        const ValueTable& table, unsigned level,
                                                        const std::vector<IntVec>& probes);

std::string export_values(const Problem& problem, const ValueTable& table);
ValueTable parse_values(std::string_view text, std::size_t dim);

}  // namespace pointwise
}  // namespace scalefn
