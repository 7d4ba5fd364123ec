#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "protect/flow.hpp"
#include "protect/io.hpp"
#include "protect/protection.hpp"
#include "protect/realization.hpp"
#include "protect/verify.hpp"

namespace protect::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kInvalidInput = 3;
inline constexpr int kZeroPerturbation = 4;
inline constexpr int kInconsistent = 5;

namespace detail {

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    io::write_file_atomic(path, content);
}

struct AnalyzeArgs {
  std::string a_path, b_path, out_path;
  double tol = kDefaultProtectionTolerance;
};

inline int analyze(const AnalyzeArgs& args, std::ostream& out) {
  const auto a = io::read_matrix_file(args.a_path);
  const auto b = io::read_matrix_file(args.b_path);
  if (a.matrix.size() != b.matrix.size()) throw io::ParseError("A and B have different dimensions");
  const PerturbationPair<double> pair(a.matrix, b.matrix);
  const auto report = protected_set(pair, args.tol);
  if (!args.out_path.empty()) io::write_file_atomic(args.out_path, io::analysis_report(a, b, pair, report));
  for (const auto& p : report.protected_points) out << io::format_shortest(p.lambda) << "\n";
  return kOk;
}

struct RealizeArgs {
  std::string points, weights, out_a, out_b;
  bool verify = false;
};

inline int realize_cmd(const RealizeArgs& args, std::ostream& out) {
  const auto points = io::parse_double_list(args.points, "--points");
  std::vector<double> weights;
  if (!args.weights.empty()) weights = io::parse_double_list(args.weights, "--weights");
  const auto r = args.weights.empty() ? realize<double>(points)
                                      : realize<double>(points, std::span<const double>(weights));
  if (!args.out_a.empty()) io::write_file_atomic(args.out_a, io::matrix_document(r.a, "realized A"));
  if (!args.out_b.empty()) io::write_file_atomic(args.out_b, io::matrix_document(r.b, "realized B"));
  if (!args.verify) return kOk;

  const auto report = protected_set(PerturbationPair<double>(r.a, r.b));
  const double tol = 1e-9 * source_scale(r.a);
  std::size_t certified = 0;
  for (double p : r.points) {
    const ProtectedPoint<double>* match = nullptr;
    for (const auto& q : report.protected_points)
      if (std::abs(q.lambda - p) <= tol) match = &q;
    if (match) {
      ++certified;
      out << "point " << io::format_shortest(p) << ": certified at " << io::format_shortest(match->lambda)
          << " (residual " << io::format_17(match->residual) << ")\n";
    } else {
      out << "point " << io::format_shortest(p) << ": NOT found\n";
    }
  }
  const bool extra = report.protected_points.size() != certified;
  if (extra) out << "unexpected protected points: " << report.protected_points.size() - certified << "\n";
  out << certified << "/" << r.points.size() << " points certified\n";
  return certified == r.points.size() && !extra ? kOk : kInconsistent;
}

struct FlowArgs {
  std::string a_path, b_path, out_path;
  double t_min = 0.0, t_max = 0.0;
  std::size_t steps = 0;
};

inline int flow(const FlowArgs& args, std::ostream& out) {
  const auto a = io::read_matrix_file(args.a_path);
  const auto b = io::read_matrix_file(args.b_path);
  if (a.matrix.size() != b.matrix.size()) throw io::ParseError("A and B have different dimensions");
  if (!(args.t_min < args.t_max)) throw io::ParseError("--t-min must be smaller than --t-max");
  if (args.steps < 2) throw io::ParseError("--t-steps must be at least 2");
  const auto grid = linear_grid(args.t_min, args.t_max, args.steps);
  emit(args.out_path, io::flow_csv(spectral_flow<double>(a.matrix, b.matrix, grid)), out);
  return kOk;
}

struct VerifyArgs {
  std::string a_path, b_path;
  double lambda = 0.0;
  std::string t_grid = "log:-2:6:25,symmetric";
  double tol = kDefaultProtectionTolerance;
  double hit_tol = 1e-3;
};

inline int verify(const VerifyArgs& args, std::ostream& out) {
  const auto a = io::read_matrix_file(args.a_path);
  const auto b = io::read_matrix_file(args.b_path);
  if (a.matrix.size() != b.matrix.size()) throw io::ParseError("A and B have different dimensions");
  const auto grid = io::parse_t_grid(args.t_grid);
  const PerturbationPair<double> pair(a.matrix, b.matrix);
  VerifyOptions opt;
  opt.tolerance = args.tol;
  opt.hit_tolerance = args.hit_tol;
  const auto result = verify_point(pair, args.lambda, grid.values, opt);

  out << "lambda = " << io::format_shortest(args.lambda) << ", t-grid " << grid.spec << " (" << grid.values.size()
      << " points)\n";
  std::size_t width = 0;
  for (const auto& row : result.rows) width = std::max(width, row.name.size());
  for (const auto& row : result.rows) {
    out << (row.consistent ? "  ok    " : "  FAIL  ") << row.name << std::string(width - row.name.size() + 2, ' ')
        << row.verdict << "  [" << row.value << "]\n";
  }
  if (result.first_inconsistency) {
    out << "inconsistent: " << *result.first_inconsistency << "\n";
    return kInconsistent;
  }
  out << (result.protected_point ? "consistent: protected" : "consistent: not protected") << "\n";
  return kOk;
}

}  // namespace detail

/// Runs the command line `protect <subcommand> ...`; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Protected points of self-adjoint pencils A + tB"};
  app.name("protect");
  app.require_subcommand(1);

  detail::AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "find and certify the protected points of (A, B)");
  analyze->add_option("a", analyze_args.a_path, "matrix file for A")->required();
  analyze->add_option("b", analyze_args.b_path, "matrix file for B (positive semi-definite)")->required();
  analyze->add_option("--tol", analyze_args.tol, "protection residual tolerance")->capture_default_str();
  analyze->add_option("--out", analyze_args.out_path, "write the analysis report here");

  detail::RealizeArgs realize_args;
  auto* realize = app.add_subcommand("realize", "build (A, B) whose protected set is the given points");
  realize->add_option("--points", realize_args.points, "comma separated distinct reals")->required();
  realize->add_option("--weights", realize_args.weights, "comma separated positive weights");
  realize->add_option("--out-a", realize_args.out_a, "write A here");
  realize->add_option("--out-b", realize_args.out_b, "write B here");
  realize->add_flag("--verify", realize_args.verify, "re-analyse the constructed pair");

  detail::FlowArgs flow_args;
  auto* flow = app.add_subcommand("flow", "eigenvalues of A + tB on a linear t grid, as CSV");
  flow->add_option("a", flow_args.a_path, "matrix file for A")->required();
  flow->add_option("b", flow_args.b_path, "matrix file for B")->required();
  flow->add_option("--t-min", flow_args.t_min)->required();
  flow->add_option("--t-max", flow_args.t_max)->required();
  flow->add_option("--t-steps", flow_args.steps)->required();
  flow->add_option("--out", flow_args.out_path, "CSV output path (stdout when omitted)");

  detail::VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "cross-check every characterization of protection at one point");
  verify->add_option("a", verify_args.a_path, "matrix file for A")->required();
  verify->add_option("b", verify_args.b_path, "matrix file for B")->required();
  verify->add_option("--lambda", verify_args.lambda)->required();
  verify->add_option("--t-grid", verify_args.t_grid, "lin:min:max:steps or log:min_exp:max_exp:per_decade[,symmetric]")
      ->capture_default_str();
  verify->add_option("--tol", verify_args.tol)->capture_default_str();
  verify->add_option("--hit-tol", verify_args.hit_tol)->capture_default_str();

  std::vector<std::string> argv_storage{"protect"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return detail::analyze(analyze_args, out);
    if (*realize) return detail::realize_cmd(realize_args, out);
    if (*flow) return detail::flow(flow_args, out);
    if (*verify) return detail::verify(verify_args, out);
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegeneratePerturbation& e) {
    err << "error: " << e.what() << "\n";
    return kZeroPerturbation;
  } catch (const Error& e) {
    // not symmetric, not PSD, point on the spectrum, eigensolver failure
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace protect::cli
