#include "scalefn/table_io.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "scalefn/error.hpp"

namespace scalefn::table_io {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "' in table");
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string header(std::size_t dim) {
  std::string h = "level";
  for (std::size_t i = 1; i <= dim; ++i) h += "\tk" + std::to_string(i);
  for (std::size_t i = 1; i <= dim; ++i) h += "\tx" + std::to_string(i);
  return h + "\tvalue";
}

void write_level(std::ostream& out, unsigned level, const LatticeValues& values,
                 const Eigen::MatrixXd& lattice_map) {
  for (const auto& [k, v] : values) {
    out << level;
    for (auto ki : k) out << '\t' << ki;
    for (Eigen::Index i = 0; i < lattice_map.rows(); ++i) {
      double x = 0.0;
      for (Eigen::Index j = 0; j < lattice_map.cols(); ++j)
        x += lattice_map(i, j) * static_cast<double>(k[static_cast<std::size_t>(j)]);
      out << '\t' << format_double(x);
    }
    out << '\t' << format_double(v) << '\n';
  }
}

LevelTable parse(std::string_view text, std::size_t dim) {
  LevelTable table;
  std::size_t pos = 0;
  bool seen_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header(dim)) throw Error(ErrorCode::ParseError, "missing or wrong table header");
      seen_header = true;
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 2 * dim + 2) throw Error(ErrorCode::ParseError, "wrong column count in table");
    const auto level = parse_number<unsigned>(fields[0]);
    IntVec k(dim);
    for (std::size_t i = 0; i < dim; ++i) k[i] = parse_number<std::int64_t>(fields[1 + i]);
    table[level][k] = parse_number<double>(fields.back());
  }
  if (!seen_header) throw Error(ErrorCode::ParseError, "missing table header");
  return table;
}

}  // namespace scalefn::table_io
