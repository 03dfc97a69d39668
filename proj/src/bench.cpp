#include "birkhoff/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <cmath>
#include <limits>
#include <sstream>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/dual_space.hpp"
#include "birkhoff/error.hpp"
#include "birkhoff/nlp_solver.hpp"
#include "birkhoff/ocp.hpp"

namespace birkhoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string form_name(const PrimalForm& form) {
  return std::string(to_string(form.tag)) + (form.scaled ? "_scaled" : "");
}

// Newton-KKT matrix of the scalar-lq transcription at its optimum.
double kkt_condition(const BirkhoffSystem& sys) {
  const BenchmarkProblem problem = registry("scalar-lq");
  const DiscretizedNlp nlp = transcribe(problem.mayer, sys, make_form(FormTag::A));
  const NlpResult r = solve(nlp, nlp.initial_guess(GuessStrategy::ConstantMidpoint));
  const NlpEvaluation ev = nlp.evaluate(r.z);
  const Eigen::MatrixXd H = nlp.lagrangian_hessian(r.z, r.mu_eq, r.mu_in);
  const Eigen::MatrixXd J = Eigen::MatrixXd(ev.J_eq);
  const int n = static_cast<int>(H.rows());
  const int me = static_cast<int>(J.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + me, n + me);
  K.topLeftCorner(n, n) = H;
  K.bottomLeftCorner(me, n) = J;
  K.topRightCorner(n, me) = J.transpose();
  const Eigen::VectorXd ev_abs =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs();
  const double lo = ev_abs.minCoeff();
  return lo > 0.0 ? ev_abs.maxCoeff() / lo : kInf;
}

std::vector<double> row_of(const Eigen::MatrixXd& M, int i) {
  std::vector<double> out(static_cast<std::size_t>(M.cols()));
  for (int j = 0; j < M.cols(); ++j) out[static_cast<std::size_t>(j)] = M(i, j);
  return out;
}

struct Reference {
  double cost = 0.0;
  std::function<Eigen::VectorXd(double)> state;
  std::function<Eigen::VectorXd(double)> costate;
};

Reference make_reference(const BenchmarkProblem& problem, int N_max) {
  if (problem.analytic) return {problem.analytic->cost, problem.analytic->state, problem.analytic->costate};

  const OcpDefinition& ocp = problem.mayer;
  const int N = std::max(64, N_max);
  auto sys = std::make_shared<BirkhoffSystem>(
      build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, N, ocp.horizon())));
  const PrimalForm form = make_form(FormTag::A);
  const DiscretizedNlp nlp = transcribe(ocp, *sys, form);
  const NlpResult direct = solve(nlp, nlp.initial_guess(GuessStrategy::ConstantMidpoint));
  IndirectInit init;
  init.primal = nlp.primal(direct.z);
  init.dual = map_covectors(direct, form, *sys);
  auto ref = std::make_shared<IndirectResult>(
      solve_indirect(ocp, *sys, mapped_variant(form), init));

  Reference out;
  out.cost = ocp.E(ref->primal.x_a, ref->primal.x_b);
  out.state = [sys, ref](double t) {
    const int n = static_cast<int>(ref->primal.x_a.size());
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = eval_state_interpolant(ref->primal.x_a[i], row_of(ref->primal.V, i), *sys, t);
    }
    return x;
  };
  out.costate = [sys, ref](double t) {
    const int n = static_cast<int>(ref->dual.lambda_b.size());
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) {
      l[i] = eval_costate_interpolant(ref->dual.lambda_b[i], row_of(ref->dual.Omega, i), *sys, t);
    }
    return l;
  };
  return out;
}

}  // namespace

double condition_number(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return kInf;
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
  const double lo = s[s.size() - 1];
  return lo > 0.0 ? s[0] / lo : kInf;
}

Eigen::MatrixXd core_rows(const Eigen::MatrixXd& M) {
  if (M.rows() < 2) throw Error(ErrorCode::ShapeError, "core needs at least two rows");
  return M.bottomRows(M.rows() - 1);
}

std::vector<CondStudyRow> cond_study(GridKind kind, const std::vector<int>& N_list,
                                     const CondStudyOptions& options) {
  if (!std::is_sorted(N_list.begin(), N_list.end())) {
    throw Error(ErrorCode::InvalidConfig, "N list must be sorted ascending");
  }
  const Domain domain = registry("scalar-lq").mayer.horizon();
  std::vector<CondStudyRow> rows;
  for (int N : N_list) {
    CondStudyRow row;
    row.N = N;
    row.kind = kind;
    row.cond_D = row.cond_B_a = row.cond_kkt = kNaN;
    if (N < 1 || N > kMaxBirkhoffOrder) {
      row.note = "skipped: N outside [1, " + std::to_string(kMaxBirkhoffOrder) + "]";
      rows.push_back(row);
      continue;
    }
    try {
      const auto start = std::chrono::steady_clock::now();
      const BirkhoffSystem sys = build_birkhoff(make_grid(kind, N, domain));
      row.build_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.built = true;
      row.cond_D = condition_number(core_rows(sys.D()));
      row.cond_B_a = condition_number(core_rows(sys.B_a()));
      if (N <= options.kkt_max_order) {
        row.cond_kkt = kkt_condition(sys);
      } else {
        row.note = "kkt skipped above N=" + std::to_string(options.kkt_max_order);
      }
    } catch (const Error& e) {
      row.note = std::string(to_string(e.code()));
    }
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeError, "slope inputs differ in length");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (count < 2 || denom == 0.0) throw Error(ErrorCode::ShapeError, "slope needs two distinct points");
  return (count * sxy - sx * sy) / denom;
}

std::vector<ConvergenceRow> convergence_study(const std::string& problem_name, PrimalForm form,
                                              GridKind kind, const std::vector<int>& N_list) {
  if (N_list.empty()) return {};
  const BenchmarkProblem problem = registry(problem_name);
  const OcpDefinition& ocp = problem.mayer;
  const Reference ref = make_reference(problem, *std::max_element(N_list.begin(), N_list.end()));
  bool has_mapping = true;
  try {
    mapping_theorem(form);
  } catch (const Error&) {
    has_mapping = false;
  }

  std::vector<ConvergenceRow> rows;
  for (int N : N_list) {
    ConvergenceRow row;
    row.N = N;
    row.cost_error = row.state_error = kInf;
    row.costate_error = row.cmt_residual = has_mapping ? kInf : kNaN;
    try {
      const BirkhoffSystem sys = build_birkhoff(make_grid(kind, N, ocp.horizon()));
      const DiscretizedNlp nlp = transcribe(ocp, sys, form);
      const NlpResult r = solve(nlp, nlp.initial_guess(GuessStrategy::ConstantMidpoint));
      row.status = std::string(to_string(r.status));
      row.iterations = r.iterations;
      if (r.status == SolverStatus::Converged) {
        const PrimalSolution p = nlp.primal(r.z);
        row.cost_error = std::abs(p.objective - ref.cost);
        row.state_error = 0.0;
        for (int k = 0; k < sys.size(); ++k) {
          const double t = sys.grid().node(k);
          row.state_error = std::max(row.state_error, (p.X.col(k) - ref.state(t)).cwiseAbs().maxCoeff());
        }
        if (has_mapping) {
          const DualTrajectory d = map_covectors(r, form, sys);
          row.costate_error = 0.0;
          for (int k = 0; k < sys.size(); ++k) {
            const double t = sys.grid().node(k);
            row.costate_error =
                std::max(row.costate_error, (d.Lambda.col(k) - ref.costate(t)).cwiseAbs().maxCoeff());
          }
          row.cmt_residual = verify_pontryagin(ocp, p, d, sys, mapped_variant(form)).residuals.max();
        }
      }
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string cond_study_csv(const std::vector<CondStudyRow>& rows) {
  std::ostringstream os;
  os << "kind,N,cond_D,cond_B_a,cond_kkt,note\n";
  for (const auto& r : rows) {
    os << short_tag(r.kind) << ',' << r.N << ',' << format_double(r.cond_D) << ','
       << format_double(r.cond_B_a) << ',' << format_double(r.cond_kkt) << ',' << r.note << '\n';
  }
  return os.str();
}

std::string convergence_csv(const std::string& problem, PrimalForm form, GridKind kind,
                            const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "problem,form,kind,N,cost_error,state_error,costate_error,cmt_residual,status,iterations\n";
  for (const auto& r : rows) {
    os << problem << ',' << form_name(form) << ',' << short_tag(kind) << ',' << r.N << ','
       << format_double(r.cost_error) << ',' << format_double(r.state_error) << ','
       << format_double(r.costate_error) << ',' << format_double(r.cmt_residual) << ','
       << r.status << ',' << r.iterations << '\n';
  }
  return os.str();
}

std::string cond_gnuplot_script(const std::string& csv_name, const std::string& png_name) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << png_name << "'\n"
     << "set logscale xy\n"
     << "set xlabel 'N'\n"
     << "set ylabel 'condition number'\n"
     << "set key top left\n"
     << "plot '" << csv_name << "' every ::1 using 2:3 with linespoints title 'D (core)', \\\n"
     << "     '' every ::1 using 2:4 with linespoints title 'B_a (core)', \\\n"
     << "     '' every ::1 using 2:5 with linespoints title 'KKT (scalar-lq)'\n";
  return os.str();
}

std::string convergence_gnuplot_script(const std::string& csv_name, const std::string& png_name) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << png_name << "'\n"
     << "set logscale y\n"
     << "set xlabel 'N'\n"
     << "set ylabel 'error'\n"
     << "plot '" << csv_name << "' every ::1 using 4:5 with linespoints title 'cost', \\\n"
     << "     '' every ::1 using 4:6 with linespoints title 'state', \\\n"
     << "     '' every ::1 using 4:7 with linespoints title 'costate'\n";
  return os.str();
}

}  // namespace birkhoff
