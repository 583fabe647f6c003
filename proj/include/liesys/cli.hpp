#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liesys::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 1, kNumericalError = 2 };

struct SimulateOptions {
  std::string system_path;
  std::string method = "closed";
  int samples = 100;
  std::string out_path;
};

struct ConvergeOptions {
  std::string system_path;
  int n_max = 4096;
  std::string out_path;
};

struct CheckOptions {
  std::string system_path;
  bool json = false;
};

/// Writes the trajectory CSV and prints the endpoint and ODE residual.
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

/// Endpoint error of the product formula for n = 1, 2, 4, ..., n_max against
/// the closed form (inner derivations) or a dense RK4 reference.
int cmd_converge(const ConvergeOptions& options, std::ostream& out, std::ostream& err);

/// Prints the controllability report.
int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests; args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liesys::cli
