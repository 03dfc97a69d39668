#include "birkhoff/transcription.hpp"

#include <cmath>
#include <limits>

#include "birkhoff/error.hpp"

namespace birkhoff {

namespace {

using Triplet = Eigen::Triplet<double>;

struct NodeValues {
  Eigen::MatrixXd X, U, V;
  Eigen::VectorXd x_a, x_b;
};

NodeValues unpack(const NlpLayout& L, const Eigen::VectorXd& phys) {
  NodeValues v;
  const int n = L.nodes();
  v.X.resize(L.n_x, n);
  v.U.resize(L.n_u, n);
  v.V.resize(L.n_x, n);
  v.x_a.resize(L.n_x);
  v.x_b.resize(L.n_x);
  for (int i = 0; i < L.n_x; ++i) {
    for (int k = 0; k < n; ++k) {
      v.X(i, k) = phys[L.X(i, k)];
      v.V(i, k) = phys[L.V(i, k)];
    }
    v.x_a[i] = phys[L.x_a(i)];
    v.x_b[i] = phys[L.x_b(i)];
  }
  for (int c = 0; c < L.n_u; ++c) {
    for (int k = 0; k < n; ++k) v.U(c, k) = phys[L.U(c, k)];
  }
  return v;
}

Eigen::VectorXd checked_dynamics(const OcpDefinition& ocp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, int node) {
  Eigen::VectorXd fx = ocp.f(x, u);
  if (fx.size() != ocp.n_x) {
    throw Error(ErrorCode::ShapeError, "dynamics returned " + std::to_string(fx.size()) +
                                           " entries, expected " + std::to_string(ocp.n_x));
  }
  if (!fx.allFinite()) {
    throw Error(ErrorCode::EvaluationError, "non-finite dynamics at node " + std::to_string(node));
  }
  return fx;
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix M(rows, cols);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

}  // namespace

std::string_view to_string(FormTag tag) {
  switch (tag) {
    case FormTag::A: return "a";
    case FormTag::B: return "b";
    case FormTag::AStar: return "a_star";
    case FormTag::BStar: return "b_star";
  }
  return "a";
}

FormTag form_tag_from_string(std::string_view tag) {
  if (tag == "a") return FormTag::A;
  if (tag == "b") return FormTag::B;
  if (tag == "a_star" || tag == "a*") return FormTag::AStar;
  if (tag == "b_star" || tag == "b*") return FormTag::BStar;
  throw Error(ErrorCode::InvalidForm, "unknown form '" + std::string(tag) + "'");
}

PrimalForm make_form(FormTag tag, bool scaled) {
  if (scaled && (tag == FormTag::AStar || tag == FormTag::BStar)) {
    throw Error(ErrorCode::InvalidForm, "variable scaling applies to forms a and b only");
  }
  return {tag, scaled};
}

GuessStrategy guess_strategy_from_string(std::string_view tag) {
  if (tag == "constant-midpoint") return GuessStrategy::ConstantMidpoint;
  if (tag == "linear-endpoint-interpolation") return GuessStrategy::LinearInterpolation;
  if (tag == "user-supplied") return GuessStrategy::UserSupplied;
  throw Error(ErrorCode::InvalidConfig, "unknown initial-guess strategy '" + std::string(tag) + "'");
}

DiscretizedNlp::DiscretizedNlp(OcpDefinition ocp, BirkhoffSystem sys, PrimalForm form,
                               double feasibility_tolerance)
    : ocp_(std::move(ocp)), sys_(std::move(sys)), form_(make_form(form.tag, form.scaled)),
      feasibility_tolerance_(feasibility_tolerance) {
  check_definition(ocp_);
  if (!sys_.grid().includes_endpoints()) {
    throw Error(ErrorCode::UnsupportedGrid, "transcription needs an endpoint-inclusive grid");
  }
  const Domain d = sys_.grid().domain();
  const double slack = 1e-12 * std::max(1.0, std::abs(ocp_.tf - ocp_.t0));
  if (std::abs(d.lower - ocp_.t0) > slack || std::abs(d.upper - ocp_.tf) > slack) {
    throw Error(ErrorCode::DomainMismatch,
                "grid domain [" + format_double(d.lower) + ", " + format_double(d.upper) +
                    "] differs from the horizon [" + format_double(ocp_.t0) + ", " +
                    format_double(ocp_.tf) + "]");
  }
  if (!(feasibility_tolerance_ >= std::sqrt(std::numeric_limits<double>::epsilon()))) {
    throw Error(ErrorCode::InvalidConfig, "feasibility tolerance below sqrt(machine epsilon)");
  }
  layout_ = {sys_.order(), ocp_.n_x, ocp_.n_u};
  const NlpLayout& L = layout_;
  const int n = L.nodes();
  const Eigen::VectorXd& w = sys_.weights();

  for (int r = 0; r < ocp_.n_e(); ++r) {
    (ocp_.constraints[static_cast<std::size_t>(r)].kind == ConstraintKind::Equality ? eq_index_
                                                                                    : in_index_)
        .push_back(r);
  }

  row_weights_ = Eigen::VectorXd::Ones(n_eq());
  if (form_.starred()) {
    for (int i = 0; i < L.n_x; ++i) {
      for (int k = 0; k < n; ++k) {
        row_weights_[L.state_row(i, k)] = w[k];
        row_weights_[L.dynamics_row(i, k)] = w[k];
      }
    }
  }
  column_scaling_ = Eigen::VectorXd::Ones(L.dimension());
  if (form_.scaled) {
    for (int k = 0; k < n; ++k) {
      if (w[k] == 0.0) throw Error(ErrorCode::DegenerateWeight, "zero weight at node " + std::to_string(k));
      for (int i = 0; i < L.n_x; ++i) {
        column_scaling_[L.X(i, k)] = 1.0 / w[k];
        column_scaling_[L.V(i, k)] = 1.0 / w[k];
      }
      for (int c = 0; c < L.n_u; ++c) column_scaling_[L.U(c, k)] = 1.0 / w[k];
    }
  }

  const Eigen::MatrixXd& B = form_.right_anchored() ? sys_.B_b() : sys_.B_a();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(L.n_x) * (n * n + 4 * n + 2));
  for (int i = 0; i < L.n_x; ++i) {
    const int anchor = form_.right_anchored() ? L.x_b(i) : L.x_a(i);
    for (int k = 0; k < n; ++k) {
      const int row = L.state_row(i, k);
      t.emplace_back(row, L.X(i, k), 1.0);
      t.emplace_back(row, anchor, -1.0);
      for (int j = 0; j < n; ++j) {
        if (B(k, j) != 0.0) t.emplace_back(row, L.V(i, j), -B(k, j));
      }
      t.emplace_back(L.dynamics_row(i, k), L.V(i, k), 1.0);
    }
    const int er = L.equivalency_row(i);
    t.emplace_back(er, L.x_b(i), 1.0);
    t.emplace_back(er, L.x_a(i), -1.0);
    for (int j = 0; j < n; ++j) t.emplace_back(er, L.V(i, j), -w[j]);
  }
  constant_jacobian_ = from_triplets(n_eq(), L.dimension(), t);
}

int DiscretizedNlp::n_eq() const { return 2 * layout_.n_x * layout_.nodes() + layout_.n_x + ocp_.n_eq(); }

Eigen::VectorXd DiscretizedNlp::to_physical(const Eigen::VectorXd& z) const {
  if (z.size() != dimension()) {
    throw Error(ErrorCode::ShapeError, "decision vector has " + std::to_string(z.size()) +
                                           " entries, expected " + std::to_string(dimension()));
  }
  return column_scaling_.cwiseProduct(z);
}

Eigen::VectorXd DiscretizedNlp::from_physical(const Eigen::VectorXd& physical) const {
  if (physical.size() != dimension()) throw Error(ErrorCode::ShapeError, "physical vector has wrong length");
  return physical.cwiseQuotient(column_scaling_);
}

NlpEvaluation DiscretizedNlp::evaluate(const Eigen::VectorXd& z) const {
  const NlpLayout& L = layout_;
  const int n = L.nodes();
  const NodeValues v = unpack(L, to_physical(z));
  const Eigen::MatrixXd& B = form_.right_anchored() ? sys_.B_b() : sys_.B_a();
  const Eigen::VectorXd& anchor = form_.right_anchored() ? v.x_b : v.x_a;

  NlpEvaluation out;
  out.c_eq.resize(n_eq());
  out.c_in.resize(n_in());

  const Eigen::MatrixXd BV = v.V * B.transpose();  // row i: (B V_i)^T
  const Eigen::VectorXd wV = v.V * sys_.weights();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(L.n_x) * n * (L.n_x + L.n_u) + 4 * L.n_x * ocp_.n_e());
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd xk = v.X.col(k);
    const Eigen::VectorXd uk = v.U.col(k);
    const Eigen::VectorXd fk = checked_dynamics(ocp_, xk, uk, k);
    const Eigen::MatrixXd fx = ocp_.f_x(xk, uk);
    const Eigen::MatrixXd fu = ocp_.f_u(xk, uk);
    for (int i = 0; i < L.n_x; ++i) {
      out.c_eq[L.state_row(i, k)] = v.X(i, k) - anchor[i] - BV(i, k);
      out.c_eq[L.dynamics_row(i, k)] = v.V(i, k) - fk[i];
      for (int l = 0; l < L.n_x; ++l) {
        if (fx(i, l) != 0.0) t.emplace_back(L.dynamics_row(i, k), L.X(l, k), -fx(i, l));
      }
      for (int c = 0; c < L.n_u; ++c) {
        if (fu(i, c) != 0.0) t.emplace_back(L.dynamics_row(i, k), L.U(c, k), -fu(i, c));
      }
    }
  }
  for (int i = 0; i < L.n_x; ++i) out.c_eq[L.equivalency_row(i)] = v.x_b[i] - v.x_a[i] - wV[i];

  auto endpoint_triplets = [&](std::vector<Triplet>& dst, int row, const Eigen::VectorXd& g) {
    for (int i = 0; i < L.n_x; ++i) {
      if (g[i] != 0.0) dst.emplace_back(row, L.x_a(i), g[i]);
      if (g[L.n_x + i] != 0.0) dst.emplace_back(row, L.x_b(i), g[L.n_x + i]);
    }
  };
  for (std::size_t k = 0; k < eq_index_.size(); ++k) {
    const auto& c = ocp_.constraints[static_cast<std::size_t>(eq_index_[k])];
    const int row = L.endpoint_eq_row(static_cast<int>(k));
    out.c_eq[row] = c.value(v.x_a, v.x_b);
    endpoint_triplets(t, row, c.grad(v.x_a, v.x_b));
  }
  std::vector<Triplet> tin;
  for (std::size_t k = 0; k < in_index_.size(); ++k) {
    const auto& c = ocp_.constraints[static_cast<std::size_t>(in_index_[k])];
    out.c_in[static_cast<Eigen::Index>(k)] = c.value(v.x_a, v.x_b);
    endpoint_triplets(tin, static_cast<int>(k), c.grad(v.x_a, v.x_b));
  }

  // Variable part plus the constant part, then row (starred) and column (scaled) scaling.
  SparseMatrix J = from_triplets(n_eq(), L.dimension(), t);
  J += constant_jacobian_;
  out.c_eq = out.c_eq.cwiseProduct(row_weights_);
  out.J_eq = row_weights_.asDiagonal() * J * column_scaling_.asDiagonal();
  out.J_in = from_triplets(n_in(), L.dimension(), tin) * column_scaling_.asDiagonal();

  out.objective = ocp_.E(v.x_a, v.x_b);
  out.gradient = Eigen::VectorXd::Zero(L.dimension());
  const Eigen::VectorXd gE = ocp_.E_grad(v.x_a, v.x_b);
  for (int i = 0; i < L.n_x; ++i) {
    out.gradient[L.x_a(i)] = gE[i];
    out.gradient[L.x_b(i)] = gE[L.n_x + i];
  }
  if (!std::isfinite(out.objective) || !out.gradient.allFinite()) {
    throw Error(ErrorCode::EvaluationError, "non-finite endpoint cost");
  }
  return out;
}

Eigen::MatrixXd DiscretizedNlp::lagrangian_hessian(const Eigen::VectorXd& z,
                                                   const Eigen::VectorXd& mu_eq,
                                                   const Eigen::VectorXd& mu_in) const {
  const NlpLayout& L = layout_;
  const int n = L.nodes();
  const NodeValues v = unpack(L, to_physical(z));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(L.dimension(), L.dimension());

  // Dynamics rows carry -f; multiplier lambda_k = -(row weight) mu.
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd lam(L.n_x);
    for (int i = 0; i < L.n_x; ++i) {
      const int row = L.dynamics_row(i, k);
      lam[i] = -row_weights_[row] * mu_eq[row];
    }
    if (lam.isZero(0.0)) continue;
    const Eigen::MatrixXd Hk = dynamics_hessian(ocp_, v.X.col(k), v.U.col(k), lam);
    std::vector<int> idx;
    for (int i = 0; i < L.n_x; ++i) idx.push_back(L.X(i, k));
    for (int c = 0; c < L.n_u; ++c) idx.push_back(L.U(c, k));
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) H(idx[a], idx[b]) += Hk(a, b);
    }
  }

  Eigen::MatrixXd He = cost_hessian(ocp_, v.x_a, v.x_b);
  for (std::size_t k = 0; k < eq_index_.size(); ++k) {
    const double mu = mu_eq[L.endpoint_eq_row(static_cast<int>(k))];
    if (mu != 0.0) He += mu * constraint_hessian(ocp_, eq_index_[k], v.x_a, v.x_b);
  }
  for (std::size_t k = 0; k < in_index_.size(); ++k) {
    const double mu = mu_in[static_cast<Eigen::Index>(k)];
    if (mu != 0.0) He += mu * constraint_hessian(ocp_, in_index_[k], v.x_a, v.x_b);
  }
  std::vector<int> idx;
  for (int i = 0; i < L.n_x; ++i) idx.push_back(L.x_a(i));
  for (int i = 0; i < L.n_x; ++i) idx.push_back(L.x_b(i));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) H(idx[a], idx[b]) += He(a, b);
  }

  if (form_.scaled) H = column_scaling_.asDiagonal() * H * column_scaling_.asDiagonal();
  return H;
}

PrimalSolution DiscretizedNlp::primal(const Eigen::VectorXd& z) const {
  const NodeValues v = unpack(layout_, to_physical(z));
  PrimalSolution p;
  p.X = v.X;
  p.U = v.U;
  p.V = v.V;
  p.x_a = v.x_a;
  p.x_b = v.x_b;
  const NlpEvaluation ev = evaluate(z);
  p.objective = ev.objective;
  p.feasibility = ev.c_eq.size() ? ev.c_eq.cwiseAbs().maxCoeff() : 0.0;
  if (ev.c_in.size()) p.feasibility = std::max(p.feasibility, ev.c_in.cwiseMax(0.0).maxCoeff());
  p.equivalency_residual = (v.x_b - v.x_a - v.V * sys_.weights()).cwiseAbs().maxCoeff();
  return p;
}

Eigen::VectorXd DiscretizedNlp::pack(const PrimalSolution& p) const {
  const NlpLayout& L = layout_;
  if (p.X.rows() != L.n_x || p.X.cols() != L.nodes() || p.V.rows() != L.n_x ||
      p.V.cols() != L.nodes() || p.U.rows() != L.n_u || p.U.cols() != L.nodes() ||
      p.x_a.size() != L.n_x || p.x_b.size() != L.n_x) {
    throw Error(ErrorCode::ShapeError, "primal solution does not match the layout");
  }
  Eigen::VectorXd phys(L.dimension());
  for (int k = 0; k < L.nodes(); ++k) {
    for (int i = 0; i < L.n_x; ++i) {
      phys[L.X(i, k)] = p.X(i, k);
      phys[L.V(i, k)] = p.V(i, k);
    }
    for (int c = 0; c < L.n_u; ++c) phys[L.U(c, k)] = p.U(c, k);
  }
  for (int i = 0; i < L.n_x; ++i) {
    phys[L.x_a(i)] = p.x_a[i];
    phys[L.x_b(i)] = p.x_b[i];
  }
  return from_physical(phys);
}

Eigen::VectorXd DiscretizedNlp::initial_guess(GuessStrategy strategy, const Eigen::VectorXd& user) const {
  const NlpLayout& L = layout_;
  if (strategy == GuessStrategy::UserSupplied) {
    if (user.size() != L.dimension()) {
      throw Error(ErrorCode::ShapeError, "user guess has " + std::to_string(user.size()) +
                                             " entries, expected " + std::to_string(L.dimension()));
    }
    if (!user.allFinite()) throw Error(ErrorCode::ShapeError, "user guess has non-finite entries");
    return user;
  }
  PrimalSolution p;
  p.X.resize(L.n_x, L.nodes());
  p.V = Eigen::MatrixXd::Zero(L.n_x, L.nodes());
  p.U = Eigen::MatrixXd::Zero(L.n_u, L.nodes());
  p.x_a.resize(L.n_x);
  p.x_b.resize(L.n_x);
  const auto nodes = sys_.grid().nodes();
  const double T = ocp_.tf - ocp_.t0;
  for (int i = 0; i < L.n_x; ++i) {
    const auto& a = ocp_.initial_hint[static_cast<std::size_t>(i)];
    const auto& b = ocp_.final_hint[static_cast<std::size_t>(i)];
    const double xa = a ? *a : (b ? *b : 0.0);
    const double xb = b ? *b : xa;
    if (strategy == GuessStrategy::ConstantMidpoint) {
      const double mid = 0.5 * (xa + xb);
      p.X.row(i).setConstant(mid);
      p.x_a[i] = mid;
      p.x_b[i] = mid;
    } else {
      for (int k = 0; k < L.nodes(); ++k) {
        p.X(i, k) = xa + (nodes[static_cast<std::size_t>(k)] - ocp_.t0) / T * (xb - xa);
      }
      p.V.row(i).setConstant((xb - xa) / T);
      p.x_a[i] = xa;
      p.x_b[i] = xb;
    }
  }
  return pack(p);
}

WeightedMultipliers DiscretizedNlp::to_weighted_convention(const Eigen::VectorXd& mu_eq,
                                                     const Eigen::VectorXd& mu_in) const {
  const NlpLayout& L = layout_;
  if (mu_eq.size() != n_eq() || mu_in.size() != n_in()) {
    throw Error(ErrorCode::ShapeError, "multiplier vectors do not match the constraint counts");
  }
  const Eigen::VectorXd& w = sys_.weights();
  WeightedMultipliers m;
  m.Psi_B.resize(L.n_x, L.nodes());
  m.Psi_V.resize(L.n_x, L.nodes());
  m.psi_b.resize(L.n_x);
  m.psi_e = Eigen::VectorXd::Zero(ocp_.n_e());
  for (int i = 0; i < L.n_x; ++i) {
    for (int k = 0; k < L.nodes(); ++k) {
      const double s = mu_eq[L.state_row(i, k)];
      const double d = mu_eq[L.dynamics_row(i, k)];
      m.Psi_B(i, k) = form_.starred() ? s : s / w[k];
      m.Psi_V(i, k) = (form_.starred() || form_.scaled) ? -d : -d / w[k];
    }
    m.psi_b[i] = -mu_eq[L.equivalency_row(i)];
  }
  for (std::size_t k = 0; k < eq_index_.size(); ++k) {
    m.psi_e[eq_index_[k]] = mu_eq[L.endpoint_eq_row(static_cast<int>(k))];
  }
  for (std::size_t k = 0; k < in_index_.size(); ++k) {
    m.psi_e[in_index_[k]] = mu_in[static_cast<Eigen::Index>(k)];
  }
  return m;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> DiscretizedNlp::from_weighted_convention(
    const WeightedMultipliers& m) const {
  const NlpLayout& L = layout_;
  if (m.Psi_B.rows() != L.n_x || m.Psi_B.cols() != L.nodes() || m.Psi_V.rows() != L.n_x ||
      m.Psi_V.cols() != L.nodes() || m.psi_b.size() != L.n_x || m.psi_e.size() != ocp_.n_e()) {
    throw Error(ErrorCode::ShapeError, "weighted multipliers do not match the layout");
  }
  const Eigen::VectorXd& w = sys_.weights();
  Eigen::VectorXd mu_eq(n_eq());
  Eigen::VectorXd mu_in(n_in());
  for (int i = 0; i < L.n_x; ++i) {
    for (int k = 0; k < L.nodes(); ++k) {
      mu_eq[L.state_row(i, k)] = form_.starred() ? m.Psi_B(i, k) : m.Psi_B(i, k) * w[k];
      mu_eq[L.dynamics_row(i, k)] =
          (form_.starred() || form_.scaled) ? -m.Psi_V(i, k) : -m.Psi_V(i, k) * w[k];
    }
    mu_eq[L.equivalency_row(i)] = -m.psi_b[i];
  }
  for (std::size_t k = 0; k < eq_index_.size(); ++k) {
    mu_eq[L.endpoint_eq_row(static_cast<int>(k))] = m.psi_e[eq_index_[k]];
  }
  for (std::size_t k = 0; k < in_index_.size(); ++k) {
    mu_in[static_cast<Eigen::Index>(k)] = m.psi_e[in_index_[k]];
  }
  return {mu_eq, mu_in};
}

DiscretizedNlp transcribe(const OcpDefinition& ocp, const BirkhoffSystem& sys, PrimalForm form,
                          double feasibility_tolerance) {
  return DiscretizedNlp(ocp, sys, form, feasibility_tolerance);
}

NlpEvaluation residual_and_jacobian(const DiscretizedNlp& nlp, const Eigen::VectorXd& z) {
  if (!z.allFinite()) throw Error(ErrorCode::EvaluationError, "decision vector has non-finite entries");
  return nlp.evaluate(z);
}

}  // namespace birkhoff
