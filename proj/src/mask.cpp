#include "scalefn/mask.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scalefn/error.hpp"
#include "scalefn/lattice.hpp"

namespace scalefn {

using nlohmann::json;

Mask::Mask(std::size_t dim, std::vector<MaskEntry> entries) : dim_(dim) {
  std::erase_if(entries, [](const MaskEntry& e) { return e.c == 0.0 && (!e.exact || *e.exact == 0); });
  if (entries.empty()) throw Error(ErrorCode::EmptyMask, "mask has no nonzero coefficients");
  for (const auto& e : entries)
    if (e.q.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "mask index has wrong dimension");
  std::sort(entries.begin(), entries.end(),
            [](const MaskEntry& a, const MaskEntry& b) { return a.q < b.q; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].q == entries[i - 1].q)
      throw Error(ErrorCode::ParseError, "duplicate mask index");
  entries_ = std::move(entries);

  bool exact = all_exact();
  if (exact) {
    Rational total = 0;
    for (const auto& e : entries_) total += *e.exact;
    if (total != 1)
      throw Error(ErrorCode::MaskSumViolation,
                  "mask coefficients sum to " + mask::format_rational(total) + ", expected 1");
  } else {
    double total = 0.0;
    for (const auto& e : entries_) total += e.c;
    if (std::abs(total - 1.0) > mask::kSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "mask coefficients sum to " << total << ", expected 1";
      throw Error(ErrorCode::MaskSumViolation, os.str());
    }
  }
  radius_ = mask::mask_radius(*this);
}

double Mask::coefficient(const IntVec& q) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                             [](const MaskEntry& e, const IntVec& key) { return e.q < key; });
  return (it != entries_.end() && it->q == q) ? it->c : 0.0;
}

bool Mask::all_exact() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const MaskEntry& e) { return e.exact.has_value(); });
}

Problem make_problem(const IntMatrix& matrix, Mask mask) {
  if (matrix.dim() != mask.dim())
    throw Error(ErrorCode::DimensionMismatch, "matrix and mask dimensions differ");
  Problem p{DilationMatrix::create(matrix), std::move(mask)};
  if (p.m() < 2) throw Error(ErrorCode::NotDilation, "|det M| must be at least 2");
  return p;
}

namespace mask {
namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::int64_t as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      parse_fail(std::string("unknown field '") + key + "' in " + where);
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

// cpp_int reads a leading 0 as an octal prefix.
static BigInt decimal_integer(std::string_view digits) {
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  return digits.empty() ? BigInt(0) : BigInt(std::string(digits));
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::string_view s = text;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    BigInt d = decimal_integer(den);
    if (d == 0) return std::nullopt;
    value = Rational(decimal_integer(num), d);
  } else {
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = s.substr(0, e);
      auto exp_text = s.substr(e + 1);
      bool exp_neg = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_neg = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
      exponent = std::stol(std::string(exp_text)) * (exp_neg ? -1 : 1);
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      auto ip = mantissa.substr(0, dot), fp = mantissa.substr(dot + 1);
      if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
        return std::nullopt;
      digits = std::string(ip) + std::string(fp);
      exponent -= static_cast<long>(fp.size());
    } else {
      if (!all_digits(mantissa)) return std::nullopt;
      digits = std::string(mantissa);
    }
    BigInt num = decimal_integer(digits);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
    value = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  }
  return negative ? Rational(-value) : value;
}

std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

Problem parse_problem(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("document must be an object");
  reject_unknown(doc, {"dimension", "matrix", "coefficients"}, "document");
  for (const char* key : {"dimension", "matrix", "coefficients"})
    if (!doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");

  const std::int64_t dim = as_int(doc["dimension"], "dimension");
  if (dim < 1 || dim > static_cast<std::int64_t>(kMaxDimension))
    throw Error(ErrorCode::DimensionMismatch, "dimension must be between 1 and 8");
  const auto d = static_cast<std::size_t>(dim);

  const json& rows = doc["matrix"];
  if (!rows.is_array()) parse_fail("matrix must be a list of rows");
  if (rows.size() != d) throw Error(ErrorCode::DimensionMismatch, "matrix row count differs from dimension");
  IntMatrix matrix(d);
  for (std::size_t r = 0; r < d; ++r) {
    if (!rows[r].is_array()) parse_fail("matrix rows must be lists");
    if (rows[r].size() != d) throw Error(ErrorCode::DimensionMismatch, "matrix row length differs from dimension");
    for (std::size_t c = 0; c < d; ++c) matrix(r, c) = as_int(rows[r][c], "matrix entry");
  }

  const json& coeffs = doc["coefficients"];
  if (!coeffs.is_array()) parse_fail("coefficients must be a list");
  std::vector<MaskEntry> entries;
  for (const auto& rec : coeffs) {
    if (!rec.is_object()) parse_fail("coefficient records must be objects");
    reject_unknown(rec, {"q", "c"}, "coefficient record");
    if (!rec.contains("q") || !rec.contains("c")) parse_fail("coefficient record needs 'q' and 'c'");
    const json& q = rec["q"];
    if (!q.is_array()) parse_fail("'q' must be a list of integers");
    if (q.size() != d) throw Error(ErrorCode::DimensionMismatch, "mask index has wrong dimension");
    MaskEntry e;
    for (const auto& v : q) e.q.push_back(as_int(v, "mask index"));
    const json& c = rec["c"];
    if (c.is_number_integer()) {
      e.exact = Rational(c.get<std::int64_t>());
      e.c = static_cast<double>(*e.exact);
    } else if (c.is_number_float()) {
      e.c = c.get<double>();
    } else if (c.is_string()) {
      auto r = parse_rational(c.get<std::string>());
      if (!r) parse_fail("cannot parse coefficient '" + c.get<std::string>() + "'");
      e.exact = *r;
      e.c = static_cast<double>(*r);
    } else {
      parse_fail("coefficient must be a number or a rational string");
    }
    if (!std::isfinite(e.c)) parse_fail("coefficient is not finite");
    entries.push_back(std::move(e));
  }
  return make_problem(matrix, Mask(d, std::move(entries)));
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string serialize_problem(const Problem& problem) {
  const auto& m = problem.matrix.matrix();
  json doc;
  doc["dimension"] = m.dim();
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  doc["matrix"] = rows;
  json coeffs = json::array();
  for (const auto& e : problem.mask.entries()) {
    json rec;
    rec["q"] = e.q;
    if (e.exact)
      rec["c"] = format_rational(*e.exact);
    else
      rec["c"] = e.c;
    coeffs.push_back(rec);
  }
  doc["coefficients"] = coeffs;
  return doc.dump(2) + "\n";
}

double mask_radius(const Mask& mask) {
  if (mask.entries().empty()) throw Error(ErrorCode::EmptyMask, "mask is empty");
  double r = 0.0;
  for (const auto& e : mask.entries()) {
    double s = 0.0;
    for (auto v : e.q) s += static_cast<double>(v) * static_cast<double>(v);
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

bool same_coset(const DilationMatrix& m, const IntVec& a, const IntVec& b) {
  const auto& inv = m.inverse();
  const std::size_t d = m.dim();
  for (std::size_t r = 0; r < d; ++r) {
    Rational acc = 0;
    for (std::size_t c = 0; c < d; ++c) acc += inv(r, c) * (a[c] - b[c]);
    if (boost::multiprecision::denominator(acc) != 1) return false;
  }
  return true;
}

CosetReport coset_sum_report(const Problem& problem) {
  const auto& dm = problem.matrix;
  const std::size_t d = dm.dim();
  const std::int64_t m = dm.m();

  // Canonical representatives: the first point of [0, m)^d, in lexicographic
  // order, of each class (m·ℤᵈ ⊂ M·ℤᵈ, so this box meets every class).
  std::vector<IntVec> reps;
  const IntBox box{IntVec(d, 0), IntVec(d, m - 1)};
  for_each_point(box, [&](const IntVec& p) {
    if (static_cast<std::int64_t>(reps.size()) < m &&
        std::none_of(reps.begin(), reps.end(), [&](const IntVec& r) { return same_coset(dm, r, p); }))
      reps.push_back(p);
  });

  CosetReport report;
  const bool exact = problem.mask.all_exact();
  for (const auto& rep : reps) {
    CosetSum cs{rep, 0.0, std::nullopt};
    Rational exact_sum = 0;
    for (const auto& e : problem.mask.entries()) {
      if (!same_coset(dm, e.q, rep)) continue;
      cs.sum += e.c;
      if (exact) exact_sum += *e.exact;
    }
    if (exact) cs.exact_sum = exact_sum;
    report.classes.push_back(std::move(cs));
  }
  const double target = 1.0 / static_cast<double>(m);
  report.balanced = std::all_of(report.classes.begin(), report.classes.end(), [&](const CosetSum& c) {
    if (c.exact_sum) return *c.exact_sum * m == 1;
    return std::abs(c.sum - target) <= kCosetTolerance;
  });
  return report;
}

}  // namespace mask
}  // namespace scalefn
