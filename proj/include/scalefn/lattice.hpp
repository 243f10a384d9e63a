#pragma once

// Integer boxes, sparse lattice samples and the refinement kernel shared by
// the cascade and pointwise modules.

#include <cstdint>
#include <map>
#include <vector>

#include "scalefn/linalg.hpp"
#include "scalefn/mask.hpp"

namespace scalefn {

/// Closed integer box lo ≤ k ≤ hi (componentwise). Empty when any lo > hi.
struct IntBox {
  IntVec lo;
  IntVec hi;

  static IntBox symmetric(const IntVec& half_widths);

  std::size_t dim() const { return lo.size(); }
  bool empty() const;
  bool contains(const IntVec& k) const;
  /// Number of lattice points, saturating at UINT64_MAX.
  std::uint64_t count() const;

  friend bool operator==(const IntBox&, const IntBox&) = default;
};

/// Visits every point of the box in lexicographic order.
template <class Visitor>
void for_each_point(const IntBox& box, Visitor&& visit) {
  if (box.empty()) return;
  IntVec k = box.lo;
  const std::size_t d = box.dim();
  while (true) {
    visit(static_cast<const IntVec&>(k));
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (k[i] < box.hi[i]) {
        ++k[i];
        break;
      }
      k[i] = box.lo[i];
      if (i == 0) return;
    }
    if (d == 0) return;
  }
}

/// Sparse samples keyed by lattice index, ordered lexicographically.
using LatticeValues = std::map<IntVec, double>;

/// One term of the refinement sum: the index offset P·q and the weight m·c_q.
struct KernelTap {
  IntVec offset;
  double weight = 0.0;
};

/// Taps for V(k) = m·Σ c_q·V_prev(k − P·q).
std::vector<KernelTap> refinement_taps(const Problem& problem, const IntMatrix& shift);

/// Evaluates the refinement sum at k. `prev` returns the previous-level value
/// at an index (zero where the function vanishes).
template <class Lookup>
double refinement_kernel(const std::vector<KernelTap>& taps, const IntVec& k, Lookup&& prev) {
  double acc = 0.0;
  IntVec source(k.size());
  for (const auto& tap : taps) {
    for (std::size_t i = 0; i < k.size(); ++i) source[i] = k[i] - tap.offset[i];
    acc += tap.weight * prev(static_cast<const IntVec&>(source));
  }
  return acc;
}

IntVec add(const IntVec& a, const IntVec& b);
IntVec subtract(const IntVec& a, const IntVec& b);
double euclidean_norm(const IntVec& v);

}  // namespace scalefn
