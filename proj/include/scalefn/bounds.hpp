#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalefn/error.hpp"
#include "scalefn/lattice.hpp"
#include "scalefn/mask.hpp"

namespace scalefn {

enum class BoundKind { Ball, Box, TransformedBox };

/// Region centred at the origin known to contain the support of φ.
struct SupportBound {
  BoundKind kind = BoundKind::Ball;
  std::size_t dim = 0;
  double radius = 0.0;               // Ball
  std::vector<double> half_widths;   // Box, or P for TransformedBox
  Eigen::MatrixXd transform;         // TransformedBox: region is transform·P
  Eigen::MatrixXd transform_inverse;
  std::string provenance;

  /// Membership with a relative slack of 1e-12.
  bool contains(const Eigen::VectorXd& x) const;
};

namespace bounds {

/// Norm-ball bound Q‖M⁻¹‖/(1−‖M⁻¹‖). Throws NormNotContractive.
SupportBound ball_bound(const Problem& problem);

/// Radius after n cascade steps from an initial support of radius R:
/// ‖M⁻¹‖ⁿR + Q(‖M⁻¹‖ + … + ‖M⁻¹‖ⁿ). Throws NormNotContractive.
double finite_level_ball(const Problem& problem, double initial_radius, unsigned n);

/// Same recursion with the norms of the exact powers, ‖M⁻ⁿ‖R + QΣ‖M⁻ⁱ‖.
/// Valid for every dilation matrix; used to size cascade domains.
double level_radius(const Problem& problem, double initial_radius, unsigned n);

/// Ball bound for any dilation matrix, iterating k steps at a time where
/// ‖M⁻ᵏ‖ < 1. Throws ContractionSearchExhausted.
SupportBound general_ball_bound(const Problem& problem);
/// The k used by general_ball_bound.
unsigned contraction_block(const Problem& problem);

/// 1-D half-width Q/(|m|−1). Throws NotDilation1D.
double bound_1d(std::int64_t m, double q);

/// Per-coordinate half-widths Q/(|λ_k|−1). Throws NotDiagonal.
SupportBound diagonal_bound(const Problem& problem);

/// Limit half-widths for the coordinates of one Jordan block (k = 1..s).
/// Throws NotDilationEigenvalue.
std::vector<double> jordan_block_bound(double lambda, std::size_t s, double q);

/// Finite-level table A[n−1][k−1] for n = 1..n_max, k = 1..s.
std::vector<std::vector<double>> jordan_recurrence_table(double lambda, std::size_t s, double q,
                                                         double initial_radius, unsigned n_max);

/// Max |C⁻¹q| over the mask support, for a transform with inverse C⁻¹.
double transformed_mask_radius(const Problem& problem, const Eigen::MatrixXd& transform_inverse);

/// Parallelepiped bound C·P from the real Jordan structure.
/// Throws ComplexSpectrum, IllConditionedTransform.
SupportBound parallelepiped_bound(const Problem& problem);

/// Smallest symmetric integer box containing the bound.
IntBox enclosing_integer_box(const SupportBound& bound);
/// Per-coordinate real half-extent of the bound.
std::vector<double> coordinate_extent(const SupportBound& bound);

/// Ball if ‖M⁻¹‖ < 1, else parallelepiped, else general ball.
/// Throws NoBoundAvailable.
SupportBound best_bound(const Problem& problem);

struct BoundAttempt {
  std::string name;
  std::optional<SupportBound> bound;
  std::optional<Error> error;
};

/// Every bound applicable to the problem, in a fixed order, including the
/// reason for each one that does not apply.
std::vector<BoundAttempt> all_bounds(const Problem& problem);

}  // namespace bounds
}  // namespace scalefn
