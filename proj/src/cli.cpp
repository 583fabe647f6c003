#include "liesys/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include <CLI11.hpp>

#include "liesys/controllability.hpp"
#include "liesys/flows.hpp"
#include "liesys/system_io.hpp"

namespace liesys::cli {

namespace {

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  return file;
}

void print_matrix(std::ostream& out, const CMat& g, bool complex) {
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    out << "  ";
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      if (c > 0) out << " ";
      out << format_number(g(r, c).real());
      if (complex) out << (g(r, c).imag() < 0 ? "" : "+") << format_number(g(r, c).imag()) << "i";
    }
    out << "\n";
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemDocument doc = load_system_file(options.system_path);
    if (doc.control.empty()) throw InputError("system file has no control segments to simulate");
    const SolveMethod method = parse_method(options.method);
    const Trajectory traj = solve_piecewise(doc.system, doc.control, method, options.samples);
    if (!options.out_path.empty()) {
      std::ofstream file = open_output(options.out_path);
      write_trajectory_csv(file, traj);
    }
    for (const std::string& w : traj.warnings) err << "warning: " << w << "\n";

    out << "method: " << traj.method << "\n";
    out << "samples: " << traj.points.size() << "\n";
    out << "t_end: " << format_number(traj.times.back()) << "\n";
    out << "endpoint:\n";
    print_matrix(out, traj.endpoint().matrix(), doc.system.model()->complex_realization());
    out << "constraint_drift: " << format_number(traj.max_constraint_drift) << "\n";
    if (traj.points.size() >= 100) {
      out << "ode_residual: " << format_number(ode_residual(doc.system, traj, doc.control)) << "\n";
    } else {
      out << "ode_residual: skipped (needs at least 100 samples)\n";
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_converge(const ConvergeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemDocument doc = load_system_file(options.system_path);
    if (doc.control.empty()) throw InputError("system file has no control segments");
    if (options.n_max < 1) throw InputError("--n-max must be at least 1");

    const bool inner = doc.system.derivation().is_inner();
    const SolveMethod reference_method =
        inner ? SolveMethod{ClosedMethod{}} : SolveMethod{Rk4Method{std::max(1000, 10 * options.n_max)}};
    const std::string reference_name = inner ? "closed" : to_string(reference_method);
    const CMat reference = solve_piecewise(doc.system, doc.control, reference_method, 1).endpoint().matrix();

    std::vector<int> ns;
    std::vector<double> errors;
    for (long n = 1; n <= options.n_max; n *= 2) {
      const Trajectory traj = solve_piecewise(doc.system, doc.control, ProductMethod{static_cast<int>(n)}, 1);
      ns.push_back(static_cast<int>(n));
      errors.push_back((traj.endpoint().matrix() - reference).norm());
    }

    // Least-squares slope of -log(error) against log(n), on the asymptotic
    // range n >= 64 when it has two points, over errors above round-off.
    const bool asymptotic = std::count_if(ns.begin(), ns.end(), [](int n) { return n >= 64; }) >= 2;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (asymptotic && ns[i] < 64) continue;
      if (errors[i] <= 1e-12) continue;
      xs.push_back(std::log(static_cast<double>(ns[i])));
      ys.push_back(-std::log(errors[i]));
    }

    out << "reference: " << reference_name << "\n";
    out << "n,error\n";
    for (std::size_t i = 0; i < ns.size(); ++i) out << ns[i] << "," << format_number(errors[i]) << "\n";
    if (xs.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      out << "fitted_order: " << format_number(sxy / sxx) << "\n";
    } else {
      out << "fitted_order: n/a (errors at round-off level)\n";
    }

    if (!options.out_path.empty()) {
      std::ofstream file = open_output(options.out_path);
      file << "# reference=" << reference_name << "\n";
      file << "n,error\n";
      for (std::size_t i = 0; i < ns.size(); ++i) file << ns[i] << "," << format_number(errors[i]) << "\n";
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemDocument doc = load_system_file(options.system_path);
    const ControllabilityReport report = controllability_report(doc.system);
    if (options.json) {
      out << report_to_json(report, doc.system) << "\n";
    } else {
      out << report_to_text(report, doc.system);
    }
    return static_cast<int>(kSuccess);
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solutions and controllability diagnostics for linear control systems on matrix Lie groups"};
  app.require_subcommand(1);

  SimulateOptions simulate;
  auto* sim = app.add_subcommand("simulate", "Simulate a system file and write a trajectory CSV");
  sim->add_option("--system", simulate.system_path, "System JSON file")->required();
  sim->add_option("--method", simulate.method, "product:<n> | closed | rk4:<steps per unit time>");
  sim->add_option("--samples", simulate.samples, "Samples per control segment");
  sim->add_option("--out", simulate.out_path, "Trajectory CSV path");

  ConvergeOptions converge;
  auto* conv = app.add_subcommand("converge", "Convergence study of the product formula");
  conv->add_option("--system", converge.system_path, "System JSON file")->required();
  conv->add_option("--n-max", converge.n_max, "Largest number of factors");
  conv->add_option("--out", converge.out_path, "CSV path for (n, error) rows");

  CheckOptions check;
  auto* chk = app.add_subcommand("check", "Controllability report");
  chk->add_option("--system", check.system_path, "System JSON file")->required();
  chk->add_flag("--json", check.json, "Emit the report as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (*sim) return cmd_simulate(simulate, out, err);
  if (*conv) return cmd_converge(converge, out, err);
  return cmd_check(check, out, err);
}

}  // namespace liesys::cli
