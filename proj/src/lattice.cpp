#include "scalefn/lattice.hpp"

#include <cmath>
#include <limits>

namespace scalefn {

IntBox IntBox::symmetric(const IntVec& half_widths) {
  IntBox box;
  for (auto h : half_widths) {
    box.lo.push_back(-h);
    box.hi.push_back(h);
  }
  return box;
}

bool IntBox::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) return true;
  return false;
}

bool IntBox::contains(const IntVec& k) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (k[i] < lo[i] || k[i] > hi[i]) return false;
  return true;
}

std::uint64_t IntBox::count() const {
  if (empty()) return 0;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const auto w = static_cast<std::uint64_t>(hi[i] - lo[i]) + 1;
    if (n > std::numeric_limits<std::uint64_t>::max() / w) return std::numeric_limits<std::uint64_t>::max();
    n *= w;
  }
  return n;
}

std::vector<KernelTap> refinement_taps(const Problem& problem, const IntMatrix& shift) {
  std::vector<KernelTap> taps;
  const double m = static_cast<double>(problem.m());
  for (const auto& e : problem.mask.entries()) taps.push_back({shift.apply(e.q), m * e.c});
  return taps;
}

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IntVec subtract(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double euclidean_norm(const IntVec& v) {
  double s = 0.0;
  for (auto x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

}  // namespace scalefn
