#include "birkhoff/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "birkhoff/bench.hpp"
#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/dual_space.hpp"
#include "birkhoff/error.hpp"
#include "birkhoff/io.hpp"
#include "json.hpp"

namespace birkhoff {

namespace {

using json = nlohmann::json;

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

bool is_usage_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::NotFound:
    case ErrorCode::InvalidForm:
    case ErrorCode::InvalidOrder:
    case ErrorCode::InvalidDomain:
    case ErrorCode::UnsupportedGrid:
    case ErrorCode::DomainMismatch:
    case ErrorCode::UnsupportedMapping:
    case ErrorCode::IncompleteDerivatives:
      return true;
    default:
      return false;
  }
}

struct DirectRun {
  BenchmarkProblem problem;
  BirkhoffSystem sys;
  PrimalForm form;
  NlpResult result;
  PrimalSolution primal;
};

DirectRun run_direct(const RunConfig& c) {
  if (c.problem.empty()) throw Error(ErrorCode::InvalidConfig, "--problem is required");
  BenchmarkProblem problem = resolve_problem(c.problem);
  const PrimalForm form = make_form(c.form, c.scaled);
  BirkhoffSystem sys = build_birkhoff(make_grid(c.kind, c.N, problem.mayer.horizon()));
  const DiscretizedNlp nlp = transcribe(problem.mayer, sys, form, c.solver.tol_feas);
  NlpResult result = solve(nlp, nlp.initial_guess(guess_strategy_from_string(c.guess)), c.solver);
  PrimalSolution primal = nlp.primal(result.z);
  return {std::move(problem), std::move(sys), form, std::move(result), std::move(primal)};
}

SolutionRecord base_record(const RunConfig& c, const DirectRun& run) {
  SolutionRecord rec;
  rec.problem = run.problem.name;
  rec.method = "direct";
  rec.form = run.form;
  rec.kind = c.kind;
  rec.N = c.N;
  rec.status = std::string(to_string(run.result.status));
  rec.iterations = run.result.iterations;
  rec.residual = run.result.kkt_residual;
  rec.primal = run.primal;
  return rec;
}

void print_summary(std::ostream& out, const SolutionRecord& rec) {
  out << "problem=" << rec.problem << " method=" << rec.method << " form="
      << to_string(rec.form.tag) << (rec.form.scaled ? "_scaled" : "") << " grid=" << short_tag(rec.kind)
      << " N=" << rec.N << " status=" << rec.status << " iterations=" << rec.iterations
      << " cost=" << format_double(rec.primal.objective) << " residual=" << format_double(rec.residual)
      << '\n';
  if (rec.report) {
    out << "verification variant=" << to_string(rec.report->variant)
        << " max_residual=" << format_double(rec.report->residuals.max())
        << " tolerance=" << format_double(rec.report->tolerance)
        << " pass=" << (rec.report->pass ? "true" : "false") << '\n';
  }
  if (!rec.note.empty()) out << "note: " << rec.note << '\n';
}

std::vector<int> default_N_list(const std::string& study) {
  if (study == "cond") return {8, 16, 32, 64, 128, 256, 512};
  return {4, 8, 16, 32};
}

void add_common_options(CLI::App* sub, RunConfig& c, std::string& grid, std::string& form,
                        std::string& variant, std::string& config_path) {
  sub->add_option("--problem", c.problem, "registry name or JSON problem file");
  sub->add_option("--grid", grid, "cgl | lgl | uniform")->capture_default_str();
  sub->add_option("--N", c.N, "polynomial order")->capture_default_str();
  sub->add_option("--form", form, "a | b | a_star | b_star")->capture_default_str();
  sub->add_flag("--scaled", c.scaled, "weight-scaled decision variables");
  sub->add_option("--variant", variant, "dual variant theta,phi, e.g. a,b_star");
  sub->add_option("--tol-stat", c.solver.tol_stat, "stationarity tolerance")->capture_default_str();
  sub->add_option("--tol-feas", c.solver.tol_feas, "feasibility tolerance")->capture_default_str();
  sub->add_option("--tol-comp", c.solver.tol_comp, "complementarity tolerance")->capture_default_str();
  sub->add_option("--tol-verify", c.verify_tolerance, "Pontryagin residual tolerance");
  sub->add_option("--max-iter", c.solver.max_iter, "SQP iteration cap")->capture_default_str();
  sub->add_option("--guess", c.guess, "constant-midpoint | linear-endpoint-interpolation")
      ->capture_default_str();
  sub->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  sub->add_option("--config", config_path, "JSON config file; its keys override flags");
}

}  // namespace

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
    if (j.contains("grid")) c.kind = grid_kind_from_string(j.at("grid").get<std::string>());
    if (j.contains("N")) c.N = j.at("N").get<int>();
    if (j.contains("form")) c.form = form_tag_from_string(j.at("form").get<std::string>());
    if (j.contains("scaled")) c.scaled = j.at("scaled").get<bool>();
    if (j.contains("variant")) c.variant = dual_variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("tol_stat")) c.solver.tol_stat = j.at("tol_stat").get<double>();
    if (j.contains("tol_feas")) c.solver.tol_feas = j.at("tol_feas").get<double>();
    if (j.contains("tol_comp")) c.solver.tol_comp = j.at("tol_comp").get<double>();
    if (j.contains("tol_verify")) c.verify_tolerance = j.at("tol_verify").get<double>();
    if (j.contains("max_iter")) c.solver.max_iter = j.at("max_iter").get<int>();
    if (j.contains("guess")) c.guess = j.at("guess").get<std::string>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("study")) c.study = j.at("study").get<std::string>();
    if (j.contains("N_list")) c.N_list = j.at("N_list").get<std::vector<int>>();
    if (j.contains("domain")) {
      const auto d = j.at("domain").get<std::vector<double>>();
      if (d.size() != 2) throw Error(ErrorCode::InvalidConfig, "domain needs two numbers");
      c.domain = {d[0], d[1]};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config '" + path + "': " + e.what());
  }
}

BenchmarkProblem resolve_problem(const std::string& name_or_path) {
  const auto names = registry_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return registry(name_or_path);
  if (std::filesystem::is_regular_file(name_or_path)) return load_problem_file(name_or_path);
  throw Error(ErrorCode::NotFound, "unknown problem '" + name_or_path + "'");
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream&) {
  const DirectRun run = run_direct(c);
  SolutionRecord rec = base_record(c, run);
  int code = kExitOk;
  if (run.result.status != SolverStatus::Converged) {
    code = kExitSolverFailure;
  } else {
    try {
      const DualTrajectory dual = map_covectors(run.result, run.form, run.sys);
      const DualVariant variant = c.variant ? *c.variant : mapped_variant(run.form);
      const double tol = c.verify_tolerance
                             ? *c.verify_tolerance
                             : default_pontryagin_tolerance(run.sys, c.solver.tol_stat);
      rec.variant = variant;
      rec.dual = dual;
      rec.report = verify_pontryagin(run.problem.mayer, run.primal, dual, run.sys, variant, tol);
      if (!rec.report->pass) code = kExitVerificationFailed;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnsupportedMapping) throw;
      rec.note = std::string(e.what()) + "; verification skipped";
    }
  }
  write_text(out_path(c, "solution.json"), solution_json(rec));
  write_text(out_path(c, "trajectory.csv"),
             trajectory_csv(run.sys, run.primal, rec.dual ? &*rec.dual : nullptr));
  print_summary(out, rec);
  return code;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
  mapping_theorem(make_form(c.form, c.scaled));  // reject unverifiable forms before solving
  const DirectRun run = run_direct(c);
  SolutionRecord rec = base_record(c, run);
  if (run.result.status != SolverStatus::Converged) {
    print_summary(out, rec);
    return kExitSolverFailure;
  }
  const DualTrajectory dual = map_covectors(run.result, run.form, run.sys);
  const DualVariant variant = c.variant ? *c.variant : mapped_variant(run.form);
  const double tol = c.verify_tolerance ? *c.verify_tolerance
                                        : default_pontryagin_tolerance(run.sys, c.solver.tol_stat);
  rec.variant = variant;
  rec.dual = dual;
  rec.report = verify_pontryagin(run.problem.mayer, run.primal, dual, run.sys, variant, tol);
  write_text(out_path(c, "report.json"), report_json(*rec.report));
  write_text(out_path(c, "dual.csv"), dual_csv(run.sys, dual));
  print_summary(out, rec);
  for (const auto& [name, value] : rec.report->residuals.blocks) {
    out << "  " << name << " = " << format_double(value) << '\n';
  }
  return rec.report->pass ? kExitOk : kExitVerificationFailed;
}

int cmd_indirect(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.problem.empty()) throw Error(ErrorCode::InvalidConfig, "--problem is required");
  const BenchmarkProblem problem = resolve_problem(c.problem);
  const BirkhoffSystem sys = build_birkhoff(make_grid(c.kind, c.N, problem.mayer.horizon()));
  const DualVariant variant = c.variant ? *c.variant : DualVariant{FormTag::A, FormTag::BStar};
  SolutionRecord rec;
  rec.problem = problem.name;
  rec.method = "indirect";
  rec.form = make_form(variant.theta);
  rec.variant = variant;
  rec.kind = c.kind;
  rec.N = c.N;
  try {
    const IndirectResult r = solve_indirect(problem.mayer, sys, variant);
    rec.status = "converged";
    rec.iterations = r.iterations;
    rec.residual = r.residual;
    rec.primal = r.primal;
    rec.dual = r.dual;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence) throw;
    rec.status = "no-convergence";
    rec.note = e.what();
    print_summary(out, rec);
    return kExitSolverFailure;
  }
  write_text(out_path(c, "solution.json"), solution_json(rec));
  write_text(out_path(c, "trajectory.csv"), trajectory_csv(sys, rec.primal, &*rec.dual));
  print_summary(out, rec);
  return kExitOk;
}

int cmd_bench(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::vector<int> Ns = c.N_list.empty() ? default_N_list(c.study) : c.N_list;
  if (c.study == "cond") {
    const auto rows = cond_study(c.kind, Ns);
    const std::string stem = "cond_" + std::string(short_tag(c.kind));
    write_text(out_path(c, stem + ".csv"), cond_study_csv(rows));
    write_text(out_path(c, stem + ".gp"), cond_gnuplot_script(stem + ".csv", stem + ".png"));
    std::vector<double> x, d, b;
    for (const auto& r : rows) {
      x.push_back(r.N);
      d.push_back(r.cond_D);
      b.push_back(r.cond_B_a);
    }
    out << cond_study_csv(rows);
    try {
      out << "slope cond_D=" << format_double(loglog_slope(x, d))
          << " slope cond_B_a=" << format_double(loglog_slope(x, b)) << '\n';
    } catch (const Error&) {
      out << "slope unavailable (fewer than two finite rows)\n";
    }
    return kExitOk;
  }
  if (c.study == "convergence") {
    if (c.problem.empty()) throw Error(ErrorCode::InvalidConfig, "--problem is required");
    const PrimalForm form = make_form(c.form, c.scaled);
    const auto rows = convergence_study(c.problem, form, c.kind, Ns);
    const std::string stem = "convergence_" + c.problem + "_" + std::string(to_string(form.tag)) +
                             (form.scaled ? "_scaled" : "") + "_" + std::string(short_tag(c.kind));
    const std::string csv = convergence_csv(c.problem, form, c.kind, rows);
    write_text(out_path(c, stem + ".csv"), csv);
    write_text(out_path(c, stem + ".gp"), convergence_gnuplot_script(stem + ".csv", stem + ".png"));
    out << csv;
    return kExitOk;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown study '" + c.study + "' (cond | convergence)");
}

int cmd_grids(const RunConfig& c, std::ostream& out, std::ostream&) {
  const BirkhoffSystem sys = build_birkhoff(make_grid(c.kind, c.N, c.domain));
  const std::string name = "birkhoff_" + std::string(short_tag(c.kind)) + "_" + std::to_string(c.N) + ".json";
  write_text(out_path(c, name), birkhoff_json(sys));
  out << "grid=" << short_tag(c.kind) << " N=" << c.N << " sum_w=" << format_double(sys.weights().sum())
      << " transform_residual=" << format_double(sys.modal().transform_residual)
      << " integration_by_parts_norm=" << format_double(integration_by_parts_norm(sys)) << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Birkhoff pseudospectral optimal control toolkit"};
  app.require_subcommand(1);
  RunConfig config;
  std::string grid = "lgl";
  std::string form = "a";
  std::string variant;
  std::string config_path;
  std::string domain;

  CLI::App* solve_cmd = app.add_subcommand("solve", "direct solve, covector mapping and verification");
  CLI::App* verify_cmd = app.add_subcommand("verify", "check the mapped costates against a dual system");
  CLI::App* indirect_cmd = app.add_subcommand("indirect", "damped Newton on a dual system");
  CLI::App* bench_cmd = app.add_subcommand("bench", "conditioning or convergence study");
  CLI::App* grids_cmd = app.add_subcommand("grids", "dump the Birkhoff matrices of one grid");
  for (CLI::App* sub : {solve_cmd, verify_cmd, indirect_cmd, bench_cmd, grids_cmd}) {
    add_common_options(sub, config, grid, form, variant, config_path);
  }
  bench_cmd->add_option("--study", config.study, "cond | convergence")->capture_default_str();
  bench_cmd->add_option("--N-list", config.N_list, "comma-separated orders")->delimiter(',');
  grids_cmd->add_option("--domain", domain, "lo,hi (default -1,1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    config.kind = grid_kind_from_string(grid);
    config.form = form_tag_from_string(form);
    if (!variant.empty()) config.variant = dual_variant_from_string(variant);
    if (!domain.empty()) {
      const auto comma = domain.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--domain expects lo,hi");
      try {
        config.domain = {std::stod(domain.substr(0, comma)), std::stod(domain.substr(comma + 1))};
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "--domain expects two numbers");
      }
    }
    if (!config_path.empty()) apply_config_file(config, config_path);

    if (*solve_cmd) return cmd_solve(config, out, err);
    if (*verify_cmd) return cmd_verify(config, out, err);
    if (*indirect_cmd) return cmd_indirect(config, out, err);
    if (*bench_cmd) return cmd_bench(config, out, err);
    return cmd_grids(config, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitSolverFailure;
  }
}

}  // namespace birkhoff
