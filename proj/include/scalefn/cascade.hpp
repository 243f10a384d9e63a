#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "scalefn/lattice.hpp"
#include "scalefn/mask.hpp"

namespace scalefn {

enum class InitialFunctionKind { IndicatorBox, TensorHat };

/// Samples of the cascade iterate F_n on the lattice M^{-level}ℤᵈ, keyed by
/// the integer index k of the point M^{-level}k. Indices absent from `values`
/// inside `domain_box` hold zero; the function vanishes outside the box.
struct SampledFunction {
  unsigned level = 0;
  /// Number of cascade steps n applied to F₀. Equals `level` for the plain
  /// cascade; exceeds it after iterating on the integer lattice first.
  unsigned iterations = 0;
  LatticeValues values;
  IntBox domain_box;

  double at(const IntVec& k) const;
};

/// Axis-aligned real box; `empty` when no sample exceeds the threshold.
struct RealBox {
  bool empty = true;
  std::vector<double> lo;
  std::vector<double> hi;
};

namespace cascade {

inline constexpr double kDefaultEps = 1e-12;
inline constexpr unsigned kDefaultLevelCap = 12;

/// Radius of a ball containing the support of F₀.
double initial_support_radius(InitialFunctionKind kind, std::size_t dim);

/// Exact values of F₀ at the integer points of the box.
SampledFunction initial_samples(InitialFunctionKind kind, const DilationMatrix& matrix, const IntBox& box);

/// Index box holding every possibly nonzero sample of F_iterations on the
/// level lattice, from the finite-level support radius.
IntBox level_domain(const Problem& problem, double initial_radius, unsigned level, unsigned iterations);

/// One cascade step refining the lattice: G_n(k) = m·Σ c_q·G_{n−1}(k − M^{n−1}q).
/// Throws DomainTooSmall when a nonzero contribution lands outside `target`.
SampledFunction cascade_step(const Problem& problem, const SampledFunction& f, const IntBox& target,
                             unsigned threads = 1);
/// As above with the target box from level_domain.
SampledFunction cascade_step(const Problem& problem, const SampledFunction& f, double initial_radius,
                             unsigned threads = 1);

/// One cascade step evaluated on the integer lattice only:
/// F_n(p) = m·Σ c_q·F_{n−1}(Mp − q). Requires f.level == 0.
SampledFunction cascade_step_on_integers(const Problem& problem, const SampledFunction& f,
                                         double initial_radius);

/// Levels 0..levels of the plain cascade from F₀.
std::vector<SampledFunction> run_cascade(const Problem& problem, InitialFunctionKind kind, unsigned levels,
                                         unsigned threads = 1);

/// Samples of F_iterations at the integer points.
SampledFunction cascade_integer_values(const Problem& problem, InitialFunctionKind kind, unsigned iterations);

/// Dense double matrix M^{-level}, from the exact rational power.
Eigen::MatrixXd lattice_map(const Problem& problem, unsigned level);

Eigen::VectorXd coordinates(const Eigen::MatrixXd& lattice_map, const IntVec& k);

RealBox empirical_support(const Problem& problem, const SampledFunction& f, double eps = kDefaultEps);

/// m^{-level}·Σ_k values(k).
double discrete_mass(const Problem& problem, const SampledFunction& f);

/// m₀(u) = Σ c_q e^{−2πi(q,u)}.
std::complex<double> m0_eval(const Mask& mask, const Eigen::VectorXd& u);

/// Π_{j=1..J} m₀((Mᵀ)^{-j}u).
std::complex<double> fourier_truncated_product(const Problem& problem, const Eigen::VectorXd& u, unsigned levels);

}  // namespace cascade
}  // namespace scalefn
