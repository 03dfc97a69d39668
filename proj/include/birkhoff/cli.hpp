#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "birkhoff/grid.hpp"
#include "birkhoff/nlp_solver.hpp"
#include "birkhoff/ocp.hpp"
#include "birkhoff/pontryagin.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitSolverFailure = 1,
  kExitVerificationFailed = 2,
  kExitUsage = 64,
};

/// Defaults: form a, lgl grid, N = 32, unscaled, output to the working directory.
struct RunConfig {
  std::string problem;
  GridKind kind = GridKind::LegendreGaussLobatto;
  int N = 32;
  FormTag form = FormTag::A;
  bool scaled = false;
  std::optional<DualVariant> variant;
  SolverOptions solver;
  std::optional<double> verify_tolerance;
  std::string guess = "constant-midpoint";
  std::string out_dir = ".";
  // bench
  std::string study = "cond";
  std::vector<int> N_list;
  // grids
  Domain domain;
};

/// Overrides fields of `config` with the keys present in a JSON config file.
void apply_config_file(RunConfig& config, const std::string& path);

/// Registry name or path to a JSON problem file; throws not-found otherwise.
BenchmarkProblem resolve_problem(const std::string& name_or_path);

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_indirect(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_grids(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments, dispatches the subcommand and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace birkhoff
