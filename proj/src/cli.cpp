#include "scalefn/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalefn/bounds.hpp"
#include "scalefn/cascade.hpp"
#include "scalefn/error.hpp"
#include "scalefn/mask.hpp"
#include "scalefn/pointwise.hpp"
#include "scalefn/table_io.hpp"

namespace scalefn::cli {
namespace {

using nlohmann::ordered_json;

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string complex_text(std::complex<double> z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

std::string vec_text(const IntVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

std::string reals_text(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotDilation:
    case ErrorCode::MaskSumViolation:
    case ErrorCode::EmptyMask:
      return kExitInvalidInput;
    default:
      return kExitNumerical;
  }
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

void write_dump(const RunConfig& config, const Problem& problem, unsigned level, const LatticeValues& values) {
  if (config.dump_dir.empty()) return;
  const auto path = std::filesystem::path(config.dump_dir) /
                    (stem_of(config.problem_path) + ".level" + std::to_string(level) + ".tsv");
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  file << table_io::header(problem.dim()) << '\n';
  table_io::write_level(file, level, values, cascade::lattice_map(problem, level));
}

std::string bound_text(const SupportBound& b) {
  switch (b.kind) {
    case BoundKind::Ball:
      return "|x| <= " + num(b.radius);
    case BoundKind::Box: {
      if (b.dim == 1) return "|x| <= " + num(b.half_widths[0]);
      std::string s;
      for (std::size_t i = 0; i < b.dim; ++i)
        s += (i ? ", " : "") + std::string("|x_") + std::to_string(i + 1) + "| <= " + num(b.half_widths[i]);
      return s;
    }
    case BoundKind::TransformedBox:
      return "x in C*P, P half-widths " + reals_text(b.half_widths);
  }
  return {};
}

ordered_json bound_json(const SupportBound& b) {
  ordered_json j;
  j["kind"] = b.kind == BoundKind::Ball ? "ball" : b.kind == BoundKind::Box ? "box" : "transformed_box";
  if (b.kind == BoundKind::Ball) j["radius"] = b.radius;
  else j["half_widths"] = b.half_widths;
  if (b.kind == BoundKind::TransformedBox) j["transform"] = matrix_json(b.transform);
  j["provenance"] = b.provenance;
  const IntBox box = bounds::enclosing_integer_box(b);
  j["integer_box"] = box.hi;
  return j;
}

// Unbalanced coset sums are the usual reason for a missing eigenvalue 1.
IntegerValues explained_values(const Problem& problem, const TransferMatrix& b) {
  try {
    return pointwise::integer_values(b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoUnitEigenvalue) throw;
    const auto report = mask::coset_sum_report(problem);
    std::string msg = std::string(e.what()) + "; coset sums ";
    for (std::size_t i = 0; i < report.classes.size(); ++i)
      msg += (i ? ", " : "") + vec_text(report.classes[i].representative) + " -> " + num(report.classes[i].sum);
    msg += report.balanced ? " (balanced)" : " (unbalanced; each should be 1/" + std::to_string(problem.m()) + ")";
    throw Error(e.code(), msg);
  }
}

// ------------------------------------------------------------------ analyze

int do_analyze(const RunConfig& config, const Problem& problem, std::ostream& out) {
  const auto& dm = problem.matrix;
  const auto report = linalg::is_dilation(dm.matrix());
  std::optional<JordanStructure> jordan;
  std::optional<Error> jordan_error;
  if (dm.spectrum().all_real) {
    try {
      jordan = linalg::real_jordan_structure(dm.matrix());
    } catch (const Error& e) {
      jordan_error = e;
    }
  }
  const auto cosets = mask::coset_sum_report(problem);
  const auto contractive = linalg::first_contractive_power(dm.matrix());

  if (config.format == OutputFormat::Structured) {
    ordered_json j;
    j["dimension"] = dm.dim();
    j["determinant"] = dm.determinant();
    j["m"] = dm.m();
    ordered_json eig = ordered_json::array();
    for (auto z : dm.spectrum().eigenvalues) eig.push_back({z.real(), z.imag()});
    j["eigenvalues"] = eig;
    j["all_real"] = dm.spectrum().all_real;
    j["norm"] = dm.norm();
    j["inverse_norm"] = dm.inverse_norm();
    j["inverse_norm_squared"] = dm.inverse_norm() * dm.inverse_norm();
    j["dilation"] = report.is_dilation;
    j["first_contractive_power"] = contractive ? ordered_json(*contractive) : ordered_json(nullptr);
    j["mask_radius"] = problem.mask.radius();
    ordered_json cs = ordered_json::array();
    for (const auto& c : cosets.classes) cs.push_back({{"representative", c.representative}, {"sum", c.sum}});
    j["coset_sums"] = cs;
    j["cosets_balanced"] = cosets.balanced;
    if (jordan) {
      ordered_json blocks = ordered_json::array();
      for (const auto& b : jordan->blocks) blocks.push_back({{"eigenvalue", b.eigenvalue}, {"size", b.size}});
      j["jordan"] = {{"blocks", blocks}, {"transform", matrix_json(jordan->transform)},
                     {"condition_number", jordan->condition_number}};
    } else if (jordan_error) {
      j["jordan"] = {{"error", std::string(to_string(jordan_error->code()))}};
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }

  const char* sep = config.format == OutputFormat::Delimited ? "\t" : ": ";
  out << "determinant" << sep << dm.determinant() << '\n';
  out << "m" << sep << dm.m() << '\n';
  out << "eigenvalues" << sep;
  for (std::size_t i = 0; i < dm.spectrum().eigenvalues.size(); ++i)
    out << (i ? ", " : "") << complex_text(dm.spectrum().eigenvalues[i]);
  out << '\n';
  out << "norm ||M||" << sep << num(dm.norm()) << '\n';
  out << "norm ||M^-1||" << sep << num(dm.inverse_norm()) << '\n';
  out << "largest eigenvalue of M^-T M^-1" << sep << num(dm.inverse_norm() * dm.inverse_norm()) << '\n';
  out << "verdict" << sep << (report.is_dilation ? "dilation" : "not a dilation") << '\n';
  out << "first k with ||M^-k|| < 1" << sep << (contractive ? std::to_string(*contractive) : "none <= 64") << '\n';
  out << "mask radius Q" << sep << num(problem.mask.radius()) << '\n';
  out << "coset sums" << sep;
  for (std::size_t i = 0; i < cosets.classes.size(); ++i)
    out << (i ? ", " : "") << vec_text(cosets.classes[i].representative) << " -> " << num(cosets.classes[i].sum);
  out << (cosets.balanced ? " (balanced)" : " (unbalanced)") << '\n';
  if (jordan) {
    out << "jordan blocks" << sep;
    for (std::size_t i = 0; i < jordan->blocks.size(); ++i)
      out << (i ? ", " : "") << "(" << num(jordan->blocks[i].eigenvalue) << ", size " << jordan->blocks[i].size << ")";
    out << '\n' << "jordan transform C" << sep;
    for (Eigen::Index r = 0; r < jordan->transform.rows(); ++r) {
      out << (r ? "; " : "") << "[";
      for (Eigen::Index c = 0; c < jordan->transform.cols(); ++c) out << (c ? ", " : "") << num(jordan->transform(r, c));
      out << "]";
    }
    out << '\n' << "jordan condition number" << sep << num(jordan->condition_number) << '\n';
  } else if (jordan_error) {
    out << "jordan structure" << sep << "unavailable (" << to_string(jordan_error->code()) << ")\n";
  } else {
    out << "jordan structure" << sep << "not computed (complex spectrum)\n";
  }
  return kExitOk;
}

// -------------------------------------------------------------------- bound

int do_bound(const RunConfig& config, const Problem& problem, std::ostream& out) {
  const auto attempts = bounds::all_bounds(problem);
  std::optional<SupportBound> best;
  std::optional<Error> best_error;
  try {
    best = bounds::best_bound(problem);
  } catch (const Error& e) {
    best_error = e;
  }
  if (config.format == OutputFormat::Structured) {
    ordered_json j = ordered_json::array();
    for (const auto& a : attempts) {
      ordered_json entry{{"name", a.name}};
      if (a.bound) entry["bound"] = bound_json(*a.bound);
      else entry["error"] = std::string(to_string(a.error->code()));
      j.push_back(entry);
    }
    ordered_json doc{{"bounds", j}};
    if (best) doc["best"] = bound_json(*best);
    out << doc.dump(2) << '\n';
  } else {
    const char* sep = config.format == OutputFormat::Delimited ? "\t" : ": ";
    for (const auto& a : attempts) {
      std::string label = a.name;
      if (label == "corollary d=1") label = "Corollary d=1";
      else label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
      if (a.bound) {
        out << label << sep << bound_text(*a.bound) << "  [" << a.bound->provenance << "]\n";
        if (a.bound->kind == BoundKind::TransformedBox) {
          out << "  C = ";
          for (Eigen::Index r = 0; r < a.bound->transform.rows(); ++r) {
            out << (r ? "; " : "") << "[";
            for (Eigen::Index c = 0; c < a.bound->transform.cols(); ++c)
              out << (c ? ", " : "") << num(a.bound->transform(r, c));
            out << "]";
          }
          out << '\n';
        }
      } else {
        out << label << sep << "n/a (" << to_string(a.error->code()) << ": " << a.error->what() << ")\n";
      }
    }
    if (best) {
      const IntBox box = bounds::enclosing_integer_box(*best);
      out << "Best" << sep << bound_text(*best) << "  [" << best->provenance << "]\n";
      out << "Integer box" << sep << "|k_i| <= " << vec_text(box.hi) << '\n';
    }
  }
  if (!best) throw *best_error;
  return kExitOk;
}

// ------------------------------------------------------------------ cascade

int do_cascade(const RunConfig& config, const Problem& problem, std::ostream& out) {
  const auto kind = config.hat_initial ? InitialFunctionKind::TensorHat : InitialFunctionKind::IndicatorBox;
  const auto levels = cascade::run_cascade(problem, kind, config.iters, config.threads);
  ordered_json summary = ordered_json::array();
  if (config.format == OutputFormat::Delimited) out << table_io::header(problem.dim()) << '\n';
  for (const auto& f : levels) {
    write_dump(config, problem, f.level, f.values);
    const RealBox support = cascade::empirical_support(problem, f, config.eps);
    const double mass = cascade::discrete_mass(problem, f);
    switch (config.format) {
      case OutputFormat::Delimited:
        table_io::write_level(out, f.level, f.values, cascade::lattice_map(problem, f.level));
        break;
      case OutputFormat::Structured: {
        ordered_json j{{"level", f.level}, {"samples", f.values.size()}, {"mass", mass}};
        if (support.empty) j["support"] = nullptr;
        else j["support"] = {{"lo", support.lo}, {"hi", support.hi}};
        summary.push_back(j);
        break;
      }
      case OutputFormat::Table: {
        out << "level " << f.level << ": samples " << f.values.size() << ", mass " << num(mass) << ", support ";
        if (support.empty) {
          out << "empty";
        } else {
          for (std::size_t i = 0; i < support.lo.size(); ++i)
            out << (i ? " x " : "") << "[" << num(support.lo[i]) << ", " << num(support.hi[i]) << "]";
        }
        out << '\n';
        break;
      }
    }
  }
  if (config.format == OutputFormat::Structured) out << ordered_json{{"levels", summary}}.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- values

int do_values(const RunConfig& config, const Problem& problem, std::ostream& out, std::ostream& err) {
  const auto points = pointwise::candidate_points(problem);
  const auto values = explained_values(problem, pointwise::build_transfer_matrix(problem, points));
  if (values.non_unique)
    err << "warning: NonUniqueWarning: eigenvalue-1 eigenspace has dimension " << values.eigenspace_dimension
        << "; use --left-closed to pick the vector leading at the first point\n";
  std::optional<LatticeValues> chosen;
  if (!values.non_unique || config.left_closed) chosen = pointwise::level0_values(values, config.left_closed);

  if (config.format == OutputFormat::Structured) {
    ordered_json j;
    j["points"] = points;
    j["eigenspace_dimension"] = values.eigenspace_dimension;
    j["non_unique"] = values.non_unique;
    ordered_json basis = ordered_json::array();
    for (const auto& v : values.basis) basis.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["basis"] = basis;
    j["residual"] = values.residual;
    if (chosen) {
      ordered_json vals = ordered_json::array();
      for (const auto& [k, v] : *chosen) vals.push_back({{"k", k}, {"value", v}});
      j["values"] = vals;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  if (config.format == OutputFormat::Delimited) {
    out << "point";
    for (std::size_t i = 0; i < values.basis.size(); ++i) out << "\tbasis" << i + 1;
    if (chosen && values.non_unique) out << "\tvalue";
    out << '\n';
    for (std::size_t p = 0; p < points.size(); ++p) {
      out << vec_text(points[p]);
      for (const auto& v : values.basis) out << '\t' << table_io::format_double(v(static_cast<Eigen::Index>(p)));
      if (chosen && values.non_unique) out << '\t' << table_io::format_double(chosen->at(points[p]));
      out << '\n';
    }
    return kExitOk;
  }
  out << "candidate points: " << points.size() << '\n';
  out << "eigenspace dimension: " << values.eigenspace_dimension << '\n';
  out << "eigen residual: " << num(values.residual) << '\n';
  if (values.non_unique) {
    for (std::size_t i = 0; i < values.basis.size(); ++i) {
      out << "basis vector " << i + 1 << ":";
      for (std::size_t p = 0; p < points.size(); ++p) {
        const double v = values.basis[i](static_cast<Eigen::Index>(p));
        if (v != 0.0) out << ' ' << vec_text(points[p]) << '=' << num(v);
      }
      out << '\n';
    }
  }
  if (chosen) {
    out << (values.non_unique ? "left-closed values:\n" : "values:\n");
    for (std::size_t p = 0; p < points.size(); ++p) {
      out << "  phi" << vec_text(points[p]) << " = " << num(chosen->at(points[p]));
      if (values.structural_zero[p]) out << "  (structural zero)";
      out << '\n';
    }
  }
  return kExitOk;
}

LatticeValues seed_values(const RunConfig& config, const Problem& problem, const SupportBound& region,
                          std::ostream& err) {
  const auto values =
      explained_values(problem, pointwise::build_transfer_matrix(problem, pointwise::candidate_points(region)));
  if (values.non_unique) {
    err << "warning: NonUniqueWarning: eigenvalue-1 eigenspace has dimension " << values.eigenspace_dimension << '\n';
    if (!config.left_closed)
      throw Error(ErrorCode::NormalizationImpossible, "non-unique integer values; pass --left-closed to choose");
  }
  return pointwise::level0_values(values, config.left_closed);
}

// ------------------------------------------------------------------- refine

int do_refine(const RunConfig& config, const Problem& problem, std::ostream& out, std::ostream& err) {
  const SupportBound region = bounds::best_bound(problem);
  const auto level0 = seed_values(config, problem, region, err);
  const ValueTable table = pointwise::refine_values(problem, region, level0, config.levels, config.threads);
  for (const auto& [level, values] : table.levels) write_dump(config, problem, level, values);
  switch (config.format) {
    case OutputFormat::Delimited:
      out << pointwise::export_values(problem, table);
      break;
    case OutputFormat::Structured: {
      ordered_json levels = ordered_json::array();
      for (const auto& [level, values] : table.levels) {
        ordered_json rows = ordered_json::array();
        for (const auto& [k, v] : values) rows.push_back({{"k", k}, {"value", v}});
        levels.push_back({{"level", level}, {"values", rows}});
      }
      out << ordered_json{{"normalized", table.normalized}, {"levels", levels}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::Table:
      out << "region: " << bound_text(region) << "  [" << region.provenance << "]\n";
      for (const auto& [level, values] : table.levels) {
        std::size_t nonzero = 0;
        double lo = 0.0, hi = 0.0;
        for (const auto& [k, v] : values) {
          if (v != 0.0) ++nonzero;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        out << "level " << level << ": points " << values.size() << ", nonzero " << nonzero << ", min " << num(lo)
            << ", max " << num(hi) << '\n';
      }
      break;
  }
  return kExitOk;
}

// -------------------------------------------------------------------- check

struct CheckLine {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

std::vector<CheckLine> run_checks(const RunConfig& config, const Problem& problem, std::ostream& err) {
  std::vector<CheckLine> lines;
  auto add = [&](std::string name, const std::function<std::pair<bool, std::string>()>& fn) {
    CheckLine line{std::move(name), false, false, {}};
    try {
      auto [ok, detail] = fn();
      line.passed = ok;
      line.detail = std::move(detail);
    } catch (const Error& e) {
      line.detail = std::string(to_string(e.code())) + ": " + e.what();
      line.skipped = e.code() == ErrorCode::NoUnitEigenvalue || e.code() == ErrorCode::NormalizationImpossible;
    }
    lines.push_back(std::move(line));
  };
  const auto& dm = problem.matrix;
  const unsigned cascade_levels = std::min(config.iters, config.level_cap);
  const unsigned refine_levels = std::min(config.levels, config.level_cap);

  add("mask sum equals 1", [&] {
    double s = 0.0;
    for (const auto& e : problem.mask.entries()) s += e.c;
    return std::pair{std::abs(s - 1.0) <= 1e-12, "sum " + num(s)};
  });
  add("coset sums total the mask sum", [&] {
    const auto r = mask::coset_sum_report(problem);
    double s = 0.0, t = 0.0;
    for (const auto& c : r.classes) s += c.sum;
    for (const auto& e : problem.mask.entries()) t += e.c;
    return std::pair{std::abs(s - t) <= 1e-12, std::string(r.balanced ? "balanced" : "unbalanced (reported only)")};
  });
  add("exact inverse", [&] {
    return std::pair{multiply(dm.inverse(), RationalMatrix(dm.matrix())) == RationalMatrix::identity(dm.dim()),
                     std::string()};
  });
  add("eigenvalue product and sum", [&] {
    std::complex<double> prod = 1.0, sum = 0.0;
    for (auto z : dm.spectrum().eigenvalues) {
      prod *= z;
      sum += z;
    }
    const double det = static_cast<double>(dm.determinant());
    const double tr = static_cast<double>(dm.matrix().trace());
    const bool ok = std::abs(prod - det) <= 1e-8 * std::max(1.0, std::abs(det)) &&
                    std::abs(sum - tr) <= 1e-8 * std::max(1.0, std::abs(tr));
    return std::pair{ok, "product " + complex_text(prod) + ", sum " + complex_text(sum)};
  });
  add("some power of M^-1 contracts", [&] {
    auto k = linalg::first_contractive_power(dm.matrix());
    return std::pair{k.has_value(), k ? "k = " + std::to_string(*k) : std::string("none <= 64")};
  });
  if (dm.inverse_norm() < 1.0) {
    add("general ball equals norm ball", [&] {
      const double a = bounds::general_ball_bound(problem).radius, b = bounds::ball_bound(problem).radius;
      return std::pair{std::abs(a - b) <= 1e-12, num(a) + " vs " + num(b)};
    });
  }
  const auto kind = config.hat_initial ? InitialFunctionKind::TensorHat : InitialFunctionKind::IndicatorBox;
  std::vector<SampledFunction> levels;
  add("cascade mass conserved", [&] {
    levels = cascade::run_cascade(problem, kind, cascade_levels, config.threads);
    double worst = 0.0;
    const double m0 = cascade::discrete_mass(problem, levels.front());
    for (const auto& f : levels) worst = std::max(worst, std::abs(cascade::discrete_mass(problem, f) - m0));
    return std::pair{worst <= 1e-12 * std::max(1.0, std::abs(m0)), "max drift " + num(worst)};
  });
  add("cascade support inside bound", [&] {
    if (levels.empty()) throw Error(ErrorCode::DomainTooSmall, "cascade did not run");
    const auto& f = levels.back();
    const auto support = cascade::empirical_support(problem, f, config.eps);
    const auto box = bounds::enclosing_integer_box(bounds::best_bound(problem));
    const Eigen::MatrixXd cell = cascade::lattice_map(problem, f.level).cwiseAbs();
    bool ok = true;
    for (std::size_t i = 0; i < problem.dim() && !support.empty; ++i) {
      const double delta = cell.row(static_cast<Eigen::Index>(i)).sum();
      ok = ok && support.lo[i] >= static_cast<double>(box.lo[i]) - delta &&
           support.hi[i] <= static_cast<double>(box.hi[i]) + delta;
    }
    return std::pair{ok, "level " + std::to_string(f.level)};
  });
  add("fourier product at 0 equals 1", [&] {
    const auto v = cascade::fourier_truncated_product(problem, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.dim())), 20);
    return std::pair{v == std::complex<double>(1.0, 0.0), complex_text(v)};
  });

  std::optional<SupportBound> region;
  std::optional<IntegerValues> ints;
  add("transfer eigen-residual", [&] {
    region = bounds::best_bound(problem);
    ints = explained_values(problem, pointwise::build_transfer_matrix(problem, pointwise::candidate_points(*region)));
    if (ints->non_unique) err << "warning: NonUniqueWarning: eigenspace dimension " << ints->eigenspace_dimension << '\n';
    return std::pair{ints->residual <= 1e-8, "residual " + num(ints->residual)};
  });
  std::optional<ValueTable> table;
  add("integer values normalized", [&] {
    if (!ints) throw Error(ErrorCode::NoUnitEigenvalue, "no integer values");
    const auto level0 = pointwise::level0_values(*ints, config.left_closed);
    table = pointwise::refine_values(problem, *region, level0, refine_levels, config.threads);
    double s = 0.0;
    for (const auto& [k, v] : level0) s += v;
    return std::pair{std::abs(s - 1.0) <= 1e-12, "sum " + num(s)};
  });
  add("cross-level consistency", [&] {
    if (!table) throw Error(ErrorCode::NormalizationImpossible, "no value table");
    double worst = 0.0;
    for (unsigned j = 1; j <= refine_levels; ++j) {
      const auto& fine = table->levels.at(j);
      for (const auto& [k, v] : table->levels.at(j - 1)) {
        auto it = fine.find(dm.matrix().apply(k));
        if (it != fine.end()) worst = std::max(worst, std::abs(it->second - v));
      }
    }
    return std::pair{worst <= 1e-12, "max deviation " + num(worst)};
  });
  add("partition of unity", [&] {
    if (!table) throw Error(ErrorCode::NormalizationImpossible, "no value table");
    const unsigned j = std::min(refine_levels, 2u);
    std::vector<IntVec> probes;
    for (const auto& [k, v] : table->levels.at(j)) {
      probes.push_back(k);
      if (probes.size() >= 16) break;
    }
    double worst = 0.0;
    for (const auto& d : pointwise::periodization_check(problem, *region, *table, j, probes))
      worst = std::max(worst, d.deviation);
    return std::pair{worst <= 1e-8, "max deviation " + num(worst) + " (reported only)"};
  });
  return lines;
}

int do_check(const RunConfig& config, const Problem& problem, std::ostream& out, std::ostream& err) {
  const auto lines = run_checks(config, problem, err);
  bool all_ok = true;
  ordered_json j = ordered_json::array();
  for (const auto& l : lines) {
    const char* status = l.passed ? "PASS" : l.skipped ? "SKIP" : "FAIL";
    // Partition of unity is a property of the mask, not of this artifact.
    if (!l.passed && !l.skipped && l.name != "partition of unity") all_ok = false;
    if (config.format == OutputFormat::Structured)
      j.push_back({{"name", l.name}, {"status", status}, {"detail", l.detail}});
    else if (config.format == OutputFormat::Delimited)
      out << status << '\t' << l.name << '\t' << l.detail << '\n';
    else
      out << status << "  " << l.name << (l.detail.empty() ? "" : "  (" + l.detail + ")") << '\n';
  }
  if (config.format == OutputFormat::Structured) out << ordered_json{{"checks", j}, {"passed", all_ok}}.dump(2) << '\n';
  return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.levels > config.level_cap || config.iters > config.level_cap) {
      err << "error: UsageError: levels/iters above the cap " << config.level_cap << '\n';
      return kExitUsage;
    }
    const Problem problem = mask::load_problem(config.problem_path);
    switch (config.command) {
      case Command::Analyze: return do_analyze(config, problem, out);
      case Command::Bound: return do_bound(config, problem, out);
      case Command::Cascade: return do_cascade(config, problem, out);
      case Command::Values: return do_values(config, problem, out, err);
      case Command::Refine: return do_refine(config, problem, out, err);
      case Command::Check: return do_check(config, problem, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Support bounds, cascade iteration and exact lattice values of refinable functions"};
  app.require_subcommand(1);
  RunConfig config;
  std::string initial = "box", format = "table";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("problem", config.problem_path, "Problem document (JSON)")->required();
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "delimited", "structured"}));
    sub->add_option("--eps", config.eps, "Support threshold")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", config.threads, "Worker threads for lattice evaluation")->check(CLI::Range(1u, 256u));
    sub->add_option("--level-cap", config.level_cap, "Maximum levels/iterations")->check(CLI::Range(0u, 30u));
    sub->add_option("--dump-dir", config.dump_dir, "Directory for <stem>.level<j>.tsv dumps (empty: none)");
  };
  auto* analyze = app.add_subcommand("analyze", "Matrix and mask analysis");
  auto* bound = app.add_subcommand("bound", "Support bounds with provenance");
  auto* casc = app.add_subcommand("cascade", "Run the cascade algorithm");
  auto* values = app.add_subcommand("values", "Scaling function values at integer points");
  auto* refine = app.add_subcommand("refine", "Values on the refinement lattices M^-j Z^d");
  auto* check = app.add_subcommand("check", "Invariant suite");
  for (auto* sub : {analyze, bound, casc, values, refine, check}) add_common(sub);
  for (auto* sub : {casc, check}) {
    sub->add_option("--iters", config.iters, "Cascade iterations");
    sub->add_option("--initial", initial, "Initial function")->check(CLI::IsMember({"box", "hat"}));
  }
  for (auto* sub : {refine, check}) sub->add_option("--levels", config.levels, "Refinement levels");
  for (auto* sub : {values, refine, check})
    sub->add_flag("--left-closed", config.left_closed, "Pick the eigenvector leading at the first point when not unique");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: UsageError: " << e.what() << '\n';
    return kExitUsage;
  }
  if (analyze->parsed()) config.command = Command::Analyze;
  else if (bound->parsed()) config.command = Command::Bound;
  else if (casc->parsed()) config.command = Command::Cascade;
  else if (values->parsed()) config.command = Command::Values;
  else if (refine->parsed()) config.command = Command::Refine;
  else config.command = Command::Check;
  config.hat_initial = initial == "hat";
  config.format = format == "structured" ? OutputFormat::Structured
                  : format == "delimited" ? OutputFormat::Delimited
                                          : OutputFormat::Table;
  return run(config, out, err);
}

}  // namespace scalefn::cli
