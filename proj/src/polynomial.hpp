#pragma once

// Exact rational polynomials, square-free factorization and root finding.
// Internal to the linalg module.

#include <complex>
#include <vector>

#include "scalefn/linalg.hpp"

namespace scalefn::poly {

/// Coefficients lowest degree first; no trailing zeros (zero polynomial is empty).
using Poly = std::vector<Rational>;

Poly from_integers(const std::vector<BigInt>& coeffs);
int degree(const Poly& p);
Poly derivative(const Poly& p);
Poly monic(const Poly& p);
/// Quotient and remainder of a / b, b nonzero.
std::pair<Poly, Poly> divide(const Poly& a, const Poly& b);
Poly gcd(Poly a, Poly b);

struct Factor {
  Poly poly;          // monic, square-free
  unsigned multiplicity;
};

/// Yun's algorithm: p = Π factorᵢ^multiplicityᵢ up to a constant.
std::vector<Factor> squarefree_factorization(const Poly& p);

/// All roots of a square-free polynomial. Throws RootFindingFailure.
std::vector<std::complex<double>> roots_squarefree(const Poly& p);

}  // namespace scalefn::poly
