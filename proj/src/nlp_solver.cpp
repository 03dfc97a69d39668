#include "birkhoff/nlp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "birkhoff/error.hpp"
#include "birkhoff/sym_indefinite.hpp"

namespace birkhoff {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kCurvatureShift = 1e-4;
constexpr double kMaxCurvatureShift = 1e10;

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double violation_l1(const NlpEvaluation& ev) {
  return ev.c_eq.cwiseAbs().sum() + ev.c_in.cwiseMax(0.0).sum();
}

KktResiduals residuals_at(const NlpEvaluation& ev, const Eigen::VectorXd& mu_eq,
                          const Eigen::VectorXd& mu_in) {
  KktResiduals r;
  Eigen::VectorXd grad = ev.gradient;
  if (ev.J_eq.rows()) grad += ev.J_eq.transpose() * mu_eq;
  if (ev.J_in.rows()) grad += ev.J_in.transpose() * mu_in;
  r.stationarity = inf_norm(grad);
  r.feasibility = inf_norm(ev.c_eq);
  if (ev.c_in.size()) r.feasibility = std::max(r.feasibility, ev.c_in.cwiseMax(0.0).maxCoeff());
  for (Eigen::Index k = 0; k < ev.c_in.size(); ++k) {
    r.complementarity = std::max({r.complementarity, std::abs(mu_in[k] * ev.c_in[k]), -mu_in[k]});
  }
  return r;
}

bool converged(const KktResiduals& r, const SolverOptions& o) {
  return r.stationarity <= o.tol_stat && r.feasibility <= o.tol_feas && r.complementarity <= o.tol_comp;
}

// Newton-KKT system for the current working set, with inertia correction.
struct KktStep {
  Eigen::VectorXd p;
  Eigen::VectorXd mu_eq;
  Eigen::VectorXd mu_in;  // zero on inactive rows
  double regularization = 0.0;
  SymmetricIndefiniteSolver factor;
  Eigen::MatrixXd A;      // working-set Jacobian
  std::vector<int> working;
};

class KktSolver {
 public:
  KktSolver(const SolverOptions& o) : opt_(o) {}

  // Returns false when no shift up to the cap gives the inertia (n, m, 0).
  bool factor_and_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& c, KktStep& out) const {
    const Eigen::Index n = H.rows();
    const Eigen::Index m = A.rows();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = H;
    K.bottomLeftCorner(m, n) = A;
    K.topRightCorner(n, m) = A.transpose();
    // Singular matrices get the small doubling shift on both blocks; a nonsingular matrix
    // with too many negative eigenvalues (negative curvature) gets a growing Hessian shift.
    double delta = 0.0;
    double delta_c = 0.0;
    int singular_retries = 0;
    for (;;) {
      Eigen::MatrixXd Kr = K;
      Kr.topLeftCorner(n, n).diagonal().array() += delta;
      Kr.bottomRightCorner(m, m).diagonal().array() -= delta_c;
      const bool ok = out.factor.factorize(Kr);
      const Inertia& in = out.factor.inertia();
      if (ok && in.zero == 0 && in.positive == n && in.negative == m) {
        Eigen::VectorXd rhs(n + m);
        rhs << -g, -c;
        const Eigen::VectorXd sol = out.factor.solve(rhs);
        out.p = sol.head(n);
        out.regularization = delta;
        lagrange_ = sol.tail(m);
        return sol.allFinite();
      }
      if (!ok || in.zero > 0) {
        if (singular_retries++ >= opt_.max_regularizations) return false;
        delta = delta == 0.0 ? opt_.regularization_floor : 2.0 * delta;
        delta_c = delta;
      } else {
        delta = delta < kCurvatureShift ? kCurvatureShift : 10.0 * delta;
        if (delta > kMaxCurvatureShift) return false;
      }
    }
  }

  const Eigen::VectorXd& multipliers() const { return lagrange_; }

 private:
  const SolverOptions& opt_;
  mutable Eigen::VectorXd lagrange_;
};

// Equality-constrained QP subproblems with an active set over the inequality rows.
bool qp_step(const KktSolver& kkt, const Eigen::MatrixXd& H, const NlpEvaluation& ev,
             std::vector<int>& working, const SolverOptions& o, KktStep& out) {
  const Eigen::MatrixXd Jeq(ev.J_eq);
  const Eigen::MatrixXd Jin(ev.J_in);
  const auto me = Jeq.rows();
  const auto mi = Jin.rows();
  const int cap = 2 * static_cast<int>(mi) + 2;
  for (int it = 0; it <= cap; ++it) {
    const auto mw = static_cast<Eigen::Index>(working.size());
    Eigen::MatrixXd A(me + mw, H.cols());
    Eigen::VectorXd c(me + mw);
    A.topRows(me) = Jeq;
    c.head(me) = ev.c_eq;
    for (Eigen::Index k = 0; k < mw; ++k) {
      A.row(me + k) = Jin.row(working[static_cast<std::size_t>(k)]);
      c[me + k] = ev.c_in[working[static_cast<std::size_t>(k)]];
    }
    if (!kkt.factor_and_solve(H, A, ev.gradient, c, out)) return false;
    const Eigen::VectorXd& lag = kkt.multipliers();
    out.mu_eq = lag.head(me);
    out.mu_in = Eigen::VectorXd::Zero(mi);
    for (Eigen::Index k = 0; k < mw; ++k) out.mu_in[working[static_cast<std::size_t>(k)]] = lag[me + k];
    out.A = A;
    out.working = working;
    if (mi == 0) return true;

    // Drop the most negative active multiplier, else add the most violated inactive row.
    int drop = -1;
    double most_negative = -o.tol_comp;
    for (int r : working) {
      if (out.mu_in[r] < most_negative) {
        most_negative = out.mu_in[r];
        drop = r;
      }
    }
    if (drop >= 0) {
      working.erase(std::find(working.begin(), working.end(), drop));
      continue;
    }
    const Eigen::VectorXd lin = ev.c_in + Jin * out.p;
    int add = -1;
    double worst = o.tol_feas;
    for (int r = 0; r < static_cast<int>(mi); ++r) {
      if (std::find(working.begin(), working.end(), r) != working.end()) continue;
      if (lin[r] > worst) {
        worst = lin[r];
        add = r;
      }
    }
    if (add < 0) return true;
    working.push_back(add);
    std::sort(working.begin(), working.end());
  }
  return true;
}

std::optional<NlpEvaluation> try_evaluate(const NlpProblem& nlp, const Eigen::VectorXd& z) {
  if (!z.allFinite()) return std::nullopt;
  try {
    NlpEvaluation ev = nlp.evaluate(z);
    if (!std::isfinite(ev.objective) || !ev.c_eq.allFinite() || !ev.c_in.allFinite()) return std::nullopt;
    return ev;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EvaluationError) return std::nullopt;
    throw;
  }
}

}  // namespace

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIter: return "max-iter";
    case SolverStatus::LineSearchFailure: return "line-search-failure";
    case SolverStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

double KktResiduals::max() const { return std::max({stationarity, feasibility, complementarity}); }

KktResiduals kkt_residuals(const NlpProblem& nlp, const Eigen::VectorXd& z, const Eigen::VectorXd& mu_eq,
                           const Eigen::VectorXd& mu_in) {
  if (z.size() != nlp.dimension() || mu_eq.size() != nlp.n_eq() || mu_in.size() != nlp.n_in()) {
    throw Error(ErrorCode::ShapeError, "kkt_residual: vector sizes do not match the problem");
  }
  return residuals_at(nlp.evaluate(z), mu_eq, mu_in);
}

double kkt_residual(const NlpProblem& nlp, const Eigen::VectorXd& z, const Eigen::VectorXd& mu_eq,
                    const Eigen::VectorXd& mu_in) {
  return kkt_residuals(nlp, z, mu_eq, mu_in).max();
}

double kkt_residual(const DiscretizedNlp& nlp, const Eigen::VectorXd& z, const WeightedMultipliers& m) {
  const auto [mu_eq, mu_in] = nlp.from_weighted_convention(m);
  return kkt_residual(static_cast<const NlpProblem&>(nlp), z, mu_eq, mu_in);
}

NlpResult solve(const NlpProblem& nlp, const Eigen::VectorXd& z0, const SolverOptions& o) {
  if (z0.size() != nlp.dimension()) {
    throw Error(ErrorCode::ShapeError, "initial point has " + std::to_string(z0.size()) +
                                           " entries, expected " + std::to_string(nlp.dimension()));
  }
  NlpResult r;
  r.z = z0;
  r.mu_eq = Eigen::VectorXd::Zero(nlp.n_eq());
  r.mu_in = Eigen::VectorXd::Zero(nlp.n_in());
  auto first = try_evaluate(nlp, z0);
  if (!first) {
    r.status = SolverStatus::Infeasible;
    r.kkt_residual = std::numeric_limits<double>::infinity();
    return r;
  }
  NlpEvaluation ev = std::move(*first);

  // Least-squares equality multipliers: min |g + J_eq^T mu|.
  if (nlp.n_eq() > 0) {
    const Eigen::MatrixXd JT = Eigen::MatrixXd(ev.J_eq).transpose();
    r.mu_eq = -JT.colPivHouseholderQr().solve(ev.gradient);
  }

  const KktSolver kkt(o);
  std::vector<int> working;
  double rho = 0.0;
  for (int iter = 0;; ++iter) {
    r.residuals = residuals_at(ev, r.mu_eq, r.mu_in);
    r.kkt_residual = r.residuals.max();
    r.iterations = iter;
    const double merit_now = ev.objective + rho * violation_l1(ev);
    if (converged(r.residuals, o)) {
      r.status = SolverStatus::Converged;
      r.log.push_back({iter, merit_now, 0.0, r.residuals.stationarity, r.residuals.feasibility,
                       r.residuals.complementarity, 0.0});
      break;
    }
    if (iter >= o.max_iter) {
      r.status = SolverStatus::MaxIter;
      break;
    }

    const Eigen::MatrixXd H = nlp.lagrangian_hessian(r.z, r.mu_eq, r.mu_in);
    KktStep step;
    if (!qp_step(kkt, H, ev, working, o, step)) {
      r.status = SolverStatus::LineSearchFailure;
      break;
    }
    rho = std::max(rho, 2.0 * std::max(inf_norm(step.mu_eq), inf_norm(step.mu_in)) + 1.0);
    const double phi0 = ev.objective + rho * violation_l1(ev);
    const double slope = ev.gradient.dot(step.p) - rho * violation_l1(ev);
    const double noise = 10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi0));
    auto acceptable = [&](const NlpEvaluation& t, double alpha) {
      return t.objective + rho * violation_l1(t) <= phi0 + kArmijo * alpha * std::min(slope, 0.0) + noise;
    };

    double alpha = 1.0;
    bool accepted = false;
    bool soc_tried = false;
    Eigen::VectorXd z_trial;
    NlpEvaluation ev_trial;
    while (alpha >= kMinStep) {
      z_trial = r.z + alpha * step.p;
      auto t = try_evaluate(nlp, z_trial);
      if (t && acceptable(*t, alpha)) {
        ev_trial = std::move(*t);
        accepted = true;
        break;
      }
      if (t && alpha == 1.0 && !soc_tried) {
        // Second-order correction: re-project onto the linearized working set at z + p.
        soc_tried = true;
        const auto me = t->c_eq.size();
        Eigen::VectorXd c(step.A.rows());
        c.head(me) = t->c_eq;
        for (std::size_t k = 0; k < step.working.size(); ++k) {
          c[me + static_cast<Eigen::Index>(k)] = t->c_in[step.working[k]];
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(step.p.size() + c.size());
        rhs.tail(c.size()) = -c;
        const Eigen::VectorXd q = step.factor.solve(rhs).head(step.p.size());
        const Eigen::VectorXd z_soc = z_trial + q;
        auto s = try_evaluate(nlp, z_soc);
        if (s && acceptable(*s, 1.0)) {
          z_trial = z_soc;
          ev_trial = std::move(*s);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    r.log.push_back({iter, phi0, accepted ? alpha : 0.0, r.residuals.stationarity,
                     r.residuals.feasibility, r.residuals.complementarity, step.regularization});
    if (o.verbose) {
      std::cerr << "iter " << iter << " merit " << phi0 << " step " << alpha << " kkt "
                << r.kkt_residual << "\n";
    }
    if (!accepted) {
      r.status = SolverStatus::LineSearchFailure;
      break;
    }
    r.z = z_trial;
    r.mu_eq += alpha * (step.mu_eq - r.mu_eq);
    r.mu_in += alpha * (step.mu_in - r.mu_in);
    ev = std::move(ev_trial);
  }
  return r;
}

NlpResult solve(const DiscretizedNlp& nlp, const Eigen::VectorXd& z0, const SolverOptions& o) {
  NlpResult r = solve(static_cast<const NlpProblem&>(nlp), z0, o);
  r.multipliers = nlp.to_weighted_convention(r.mu_eq, r.mu_in);
  return r;
}

std::string iteration_log_csv(const std::vector<IterationRecord>& log) {
  std::ostringstream out;
  out << "iter,merit,step,stationarity,feasibility,complementarity,regularization\n";
  for (const auto& rec : log) {
    out << rec.iter << ',' << format_double(rec.merit) << ',' << format_double(rec.step) << ','
        << format_double(rec.stationarity) << ',' << format_double(rec.feasibility) << ','
        << format_double(rec.complementarity) << ',' << format_double(rec.regularization) << '\n';
  }
  return out.str();
}

}  // namespace birkhoff
