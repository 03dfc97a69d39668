#include "birkhoff/dual_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "birkhoff/error.hpp"

namespace birkhoff {

std::string_view to_string(MappingTheorem theorem) {
  switch (theorem) {
    case MappingTheorem::Unscaled: return "unscaled";
    case MappingTheorem::Starred: return "starred";
    case MappingTheorem::Scaled: return "scaled";
  }
  return "unknown";
}

MappingTheorem mapping_theorem(const PrimalForm& form) {
  if (form.tag == FormTag::A && !form.scaled) return MappingTheorem::Unscaled;
  if (form.tag == FormTag::AStar && !form.scaled) return MappingTheorem::Starred;
  if (form.tag == FormTag::A && form.scaled) return MappingTheorem::Scaled;
  throw Error(ErrorCode::UnsupportedMapping,
              "no verified covector mapping for form " + std::string(to_string(form.tag)) +
                  (form.scaled ? " (scaled)" : ""));
}

DualVariant mapped_variant(const PrimalForm& form) {
  switch (mapping_theorem(form)) {
    case MappingTheorem::Unscaled: return {FormTag::A, FormTag::BStar};
    case MappingTheorem::Starred: return {FormTag::AStar, FormTag::BStar};
    case MappingTheorem::Scaled: return {FormTag::A, FormTag::B};
  }
  return {};
}

DualTrajectory map_covectors(const WeightedMultipliers& m, const PrimalForm& form,
                             const Eigen::VectorXd& weights) {
  const MappingTheorem theorem = mapping_theorem(form);
  if (m.Psi_B.cols() != weights.size() || m.Psi_V.cols() != weights.size() ||
      m.Psi_B.rows() != m.Psi_V.rows() || m.psi_b.size() != m.Psi_B.rows()) {
    throw Error(ErrorCode::ShapeError, "multiplier shapes do not match the weights");
  }
  DualTrajectory d;
  d.Omega = m.Psi_B;
  if (theorem == MappingTheorem::Scaled) {
    if ((weights.array() == 0.0).any()) {
      throw Error(ErrorCode::DegenerateWeight, "zero quadrature weight in the scaled mapping");
    }
    d.Lambda = m.Psi_V.array().rowwise() / weights.transpose().array();
  } else {
    d.Lambda = m.Psi_V;
  }
  d.lambda_b = m.psi_b;
  d.lambda_a = m.psi_b - d.Omega * weights;
  d.nu = m.psi_e;
  return d;
}

DualTrajectory map_covectors(const NlpResult& result, const PrimalForm& form,
                             const BirkhoffSystem& sys) {
  if (result.status != SolverStatus::Converged) {
    throw Error(ErrorCode::NoConvergence,
                "covector mapping needs a converged solve, status is " +
                    std::string(to_string(result.status)));
  }
  if (!result.multipliers) {
    throw Error(ErrorCode::NoConvergence, "result carries no relabeled multipliers");
  }
  return map_covectors(*result.multipliers, form, sys.weights());
}

double default_pontryagin_tolerance(const BirkhoffSystem& sys, double solver_tolerance) {
  return std::max(10.0 * solver_tolerance, integration_by_parts_norm(sys));
}

PontryaginReport verify_pontryagin(const OcpDefinition& ocp, const PrimalSolution& primal,
                                   const DualTrajectory& dual, const BirkhoffSystem& sys,
                                   DualVariant variant, std::optional<double> tolerance) {
  const PontryaginSystem system(ocp, sys, variant);
  PontryaginReport report;
  report.variant = variant;
  report.residuals = system.blocks(primal, dual);
  report.tolerance = tolerance ? *tolerance : default_pontryagin_tolerance(sys);
  report.pass = report.residuals.max() <= report.tolerance;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < primal.X.cols(); ++k) {
    const double H = dual.Lambda.col(k).dot(ocp.f(primal.X.col(k), primal.U.col(k)));
    lo = std::min(lo, H);
    hi = std::max(hi, H);
  }
  report.hamiltonian_spread = primal.X.cols() > 0 ? hi - lo : 0.0;
  return report;
}

namespace {

// Newton on f_u(x, u)^T lambda = 0 for one node.
Eigen::VectorXd recover_control(const OcpDefinition& ocp, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& lambda) {
  const int m = ocp.n_u;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  if (m == 0) return u;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd g = ocp.f_u(x, u).transpose() * lambda;
    if (g.cwiseAbs().maxCoeff() <= 1e-13) break;
    const Eigen::MatrixXd Huu = dynamics_hessian(ocp, x, u, lambda).bottomRightCorner(m, m);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Huu);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::UnsupportedProblem,
                  "Hamiltonian is not regular in u (singular H_uu); control cannot be recovered");
    }
    u -= lu.solve(g);
  }
  return u;
}

Eigen::VectorXd hinted_endpoint(const std::vector<std::optional<double>>& hint, int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n && i < static_cast<int>(hint.size()); ++i) {
    if (hint[static_cast<std::size_t>(i)]) v[i] = *hint[static_cast<std::size_t>(i)];
  }
  return v;
}

}  // namespace

IndirectResult solve_indirect(const OcpDefinition& ocp, const BirkhoffSystem& sys,
                              DualVariant variant, const IndirectInit& init,
                              const IndirectOptions& options) {
  if (ocp.n_in() > 0) {
    throw Error(ErrorCode::UnsupportedProblem,
                "indirect solve supports equality endpoint constraints only");
  }
  const Domain dom = sys.grid().domain();
  if (std::abs(dom.lower - ocp.t0) > 1e-12 || std::abs(dom.upper - ocp.tf) > 1e-12) {
    throw Error(ErrorCode::DomainMismatch, "grid domain differs from the problem horizon");
  }
  const PontryaginSystem system(ocp, sys, variant);
  const int n = ocp.n_x;
  const int P = sys.size();
  const auto t = sys.grid().nodes();

  PrimalSolution p;
  if (init.primal) {
    p = *init.primal;
  } else {
    p.x_a = hinted_endpoint(ocp.initial_hint, n);
    p.x_b = hinted_endpoint(ocp.final_hint, n);
    const double h = ocp.tf - ocp.t0;
    p.X.resize(n, P);
    for (int k = 0; k < P; ++k) {
      const double s = (t[k] - ocp.t0) / h;
      p.X.col(k) = (1.0 - s) * p.x_a + s * p.x_b;
    }
    p.V = ((p.x_b - p.x_a) / h).replicate(1, P);
    p.U = Eigen::MatrixXd::Zero(ocp.n_u, P);
  }
  DualTrajectory d;
  if (init.dual) {
    d = *init.dual;
  } else {
    const Eigen::VectorXd lb = ocp.E_grad(p.x_a, p.x_b).tail(n);
    d.Lambda = lb.replicate(1, P);
    d.Omega = Eigen::MatrixXd::Zero(n, P);
    d.lambda_a = lb;
    d.lambda_b = lb;
    d.nu = Eigen::VectorXd::Zero(ocp.n_e());
  }
  if (!init.primal) {
    for (int k = 0; k < P; ++k) p.U.col(k) = recover_control(ocp, p.X.col(k), d.Lambda.col(k));
  }

  Eigen::VectorXd y = system.pack(p, d);
  Eigen::VectorXd F = system.residual(y);
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const double res = F.cwiseAbs().maxCoeff();
    if (res <= options.tolerance) break;
    const Eigen::MatrixXd J = system.jacobian(y);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd dy;
    if (lu.rcond() > 1e-14) {
      dy = lu.solve(-F);
    } else {
      // Levenberg step when the Newton matrix is numerically singular.
      const double mu = 1e-10 * std::max(1.0, J.squaredNorm() / static_cast<double>(J.rows()));
      Eigen::MatrixXd JtJ = J.transpose() * J;
      JtJ.diagonal().array() += mu;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(JtJ);
      if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "singular Newton matrix in indirect solve");
      }
      dy = ldlt.solve(-J.transpose() * F);
    }
    if (!dy.allFinite()) throw Error(ErrorCode::NoConvergence, "non-finite Newton step");

    const double f0 = F.norm();
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-10) {
      const Eigen::VectorXd trial = y + alpha * dy;
      Eigen::VectorXd Ft;
      try {
        Ft = system.residual(trial);
      } catch (const Error&) {
        alpha *= 0.5;
        continue;
      }
      if (Ft.allFinite() && Ft.norm() <= (1.0 - 1e-4 * alpha) * f0) {
        y = trial;
        F = Ft;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw Error(ErrorCode::NoConvergence,
                  "indirect line search stalled at residual " + format_double(res));
    }
  }
  const double res = F.cwiseAbs().maxCoeff();
  if (res > options.tolerance) {
    throw Error(ErrorCode::NoConvergence, "indirect solve stopped at residual " + format_double(res) +
                                              " after " + std::to_string(iter) + " iterations");
  }
  IndirectResult out;
  std::tie(out.primal, out.dual) = system.unpack(y);
  out.primal.feasibility = res;
  out.residual = res;
  out.iterations = iter;
  return out;
}

}  // namespace birkhoff
