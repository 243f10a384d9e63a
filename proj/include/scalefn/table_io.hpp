#pragma once

// Delimited-text sample tables shared by cascade dumps and value tables:
//   level <TAB> k1..kd <TAB> x1..xd <TAB> value
// with a mandatory header row. Numbers use the shortest round-trip form.

#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "scalefn/lattice.hpp"

namespace scalefn::table_io {

using LevelTable = std::map<unsigned, LatticeValues>;

std::string format_double(double x);
std::string header(std::size_t dim);

void write_level(std::ostream& out, unsigned level, const LatticeValues& values,
                 const Eigen::MatrixXd& lattice_map);

/// Parses a document written by write_level (header first). Throws ParseError.
LevelTable parse(std::string_view text, std::size_t dim);

}  // namespace scalefn::table_io
