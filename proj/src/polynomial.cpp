#include "polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scalefn/error.hpp"

namespace scalefn::poly {
namespace {

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

using cld = std::complex<long double>;

cld horner(const std::vector<long double>& c, cld z) {
  cld acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

Poly from_integers(const std::vector<BigInt>& coeffs) {
  Poly p;
  p.reserve(coeffs.size());
  for (const auto& c : coeffs) p.emplace_back(c);
  trim(p);
  return p;
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Poly monic(const Poly& p) {
  if (p.empty()) return p;
  Poly r = p;
  const Rational lead = p.back();
  for (auto& c : r) c /= lead;
  return r;
}

std::pair<Poly, Poly> divide(const Poly& a, const Poly& b) {
  Poly rem = a;
  trim(rem);
  const int db = degree(b);
  if (degree(rem) < db) return {Poly{}, rem};
  Poly quot(static_cast<std::size_t>(degree(rem) - db + 1));
  while (!rem.empty() && degree(rem) >= db) {
    const int shift = degree(rem) - db;
    const Rational f = rem.back() / b.back();
    quot[static_cast<std::size_t>(shift)] = f;
    for (int i = 0; i <= db; ++i) rem[static_cast<std::size_t>(i + shift)] -= f * b[static_cast<std::size_t>(i)];
    rem.pop_back();
    trim(rem);
  }
  trim(quot);
  return {quot, rem};
}

Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divide(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

std::vector<Factor> squarefree_factorization(const Poly& p) {
  std::vector<Factor> out;
  const Poly f = monic(p);
  if (degree(f) < 1) return out;
  const Poly fp = derivative(f);
  const Poly a0 = gcd(f, fp);
  Poly b = divide(f, a0).first;
  Poly c = divide(fp, a0).first;
  Poly d = c;
  {
    const Poly bp = derivative(b);
    d.resize(std::max(d.size(), bp.size()));
    for (std::size_t i = 0; i < bp.size(); ++i) d[i] -= bp[i];
    trim(d);
  }
  unsigned i = 1;
  while (degree(b) >= 1) {
    const Poly a = gcd(b, d);
    if (degree(a) >= 1) out.push_back({a, i});
    b = divide(b, a).first;
    c = divide(d, a).first;
    const Poly bp = derivative(b);
    d = c;
    d.resize(std::max(d.size(), bp.size()));
    for (std::size_t k = 0; k < bp.size(); ++k) d[k] -= bp[k];
    trim(d);
    ++i;
  }
  return out;
}

std::vector<std::complex<double>> roots_squarefree(const Poly& p) {
  const Poly f = monic(p);
  const int n = degree(f);
  if (n < 1) return {};
  if (n == 1) return {std::complex<double>(static_cast<double>(-f[0]), 0.0)};

  std::vector<long double> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = static_cast<long double>(f[i]);

  if (n == 2) {
    // Numerically stable quadratic formula.
    const long double b = c[1], cc = c[0];
    const long double disc = b * b - 4 * cc;
    if (disc >= 0) {
      const long double s = std::sqrt(disc);
      const long double q = -0.5L * (b + (b >= 0 ? s : -s));
      const long double r1 = q;
      const long double r2 = (q != 0) ? cc / q : 0.0L;
      return {{static_cast<double>(r1), 0.0}, {static_cast<double>(r2), 0.0}};
    }
    const long double re = -0.5L * b, im = 0.5L * std::sqrt(-disc);
    return {{static_cast<double>(re), static_cast<double>(im)},
            {static_cast<double>(re), static_cast<double>(-im)}};
  }

  std::vector<long double> dc(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) dc[i - 1] = c[i] * static_cast<long double>(i);

  // Aberth–Ehrlich iteration from points on a circle of Cauchy-bound radius.
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[static_cast<std::size_t>(i)]));
  bound += 1;
  std::vector<cld> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const long double angle = 2 * std::numbers::pi_v<long double> * k / n + 0.4L;
    z[static_cast<std::size_t>(k)] = std::polar(bound * 0.5L, angle);
  }
  constexpr int kMaxIterations = 500;
  bool converged = false;
  for (int iter = 0; iter < kMaxIterations && !converged; ++iter) {
    long double max_step = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const cld fz = horner(c, z[k]);
      const cld dfz = horner(dc, z[k]);
      if (fz == cld(0)) continue;
      const cld ratio = fz / dfz;
      cld sum = 0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k) sum += cld(1) / (z[k] - z[j]);
      const cld step = ratio / (cld(1) - ratio * sum);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0L, std::abs(z[k])));
    }
    converged = max_step < 1e-17L;
  }
  if (!converged) throw Error(ErrorCode::RootFindingFailure, "root finder did not converge");

  // Newton polish.
  for (auto& r : z) {
    for (int k = 0; k < 3; ++k) {
      const cld dfz = horner(dc, r);
      if (dfz == cld(0)) break;
      r -= horner(c, r) / dfz;
    }
  }
  std::vector<std::complex<double>> out;
  out.reserve(z.size());
  for (const auto& r : z) out.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  return out;
}

}  // namespace scalefn::poly
