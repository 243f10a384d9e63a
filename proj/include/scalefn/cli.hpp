#pragma once

#include <map>
#include <ostream>
#include <string>

namespace scalefn::cli {

enum class Command { Analyze, Bound, Cascade, Values, Refine, Check };
enum class OutputFormat { Table, Delimited, Structured };

struct RunConfig {
  Command command = Command::Analyze;
  std::string problem_path;
  unsigned levels = 6;
  unsigned iters = 8;
  double eps = 1e-12;
  OutputFormat format = OutputFormat::Table;
  unsigned threads = 1;
  bool hat_initial = false;
  bool left_closed = false;
  unsigned level_cap = 12;
  /// Directory for <stem>.level<j>.tsv dumps; empty disables them.
  std::string dump_dir = ".";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumerical = 3;

/// Executes one command. Human/data output goes to `out`; warnings and the
/// one-line `error: <Code>: message` diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Usage errors return kExitUsage.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace scalefn::cli
