#include "birkhoff/pontryagin.hpp"

#include <algorithm>

#include "birkhoff/error.hpp"

namespace birkhoff {

struct PontryaginSystem::Offsets {
  int P, n, m, ne;
  // unknowns
  int X(int i, int k) const { return i * P + k; }
  int U(int c, int k) const { return n * P + c * P + k; }
  int V(int i, int k) const { return (n + m) * P + i * P + k; }
  int xa(int i) const { return (2 * n + m) * P + i; }
  int xb(int i) const { return (2 * n + m) * P + n + i; }
  int Lam(int i, int k) const { return (2 * n + m) * P + 2 * n + i * P + k; }
  int Om(int i, int k) const { return (3 * n + m) * P + 2 * n + i * P + k; }
  int la(int i) const { return (4 * n + m) * P + 2 * n + i; }
  int lb(int i) const { return (4 * n + m) * P + 3 * n + i; }
  int nu(int r) const { return (4 * n + m) * P + 4 * n + r; }
  int total() const { return (4 * n + m) * P + 4 * n + ne; }
  // residual rows
  int r_state(int i, int k) const { return i * P + k; }
  int r_costate(int i, int k) const { return n * P + i * P + k; }
  int r_dyn(int i, int k) const { return 2 * n * P + i * P + k; }
  int r_adj(int i, int k) const { return 3 * n * P + i * P + k; }
  int r_ctrl(int c, int k) const { return 4 * n * P + c * P + k; }
  int r_ceq(int i) const { return (4 * n + m) * P + i; }
  int r_seq(int i) const { return (4 * n + m) * P + n + i; }
  int r_end(int r) const { return (4 * n + m) * P + 2 * n + r; }
  int r_ta(int i) const { return (4 * n + m) * P + 2 * n + ne + i; }
  int r_tb(int i) const { return (4 * n + m) * P + 3 * n + ne + i; }
};

namespace {

bool starred(FormTag t) { return t == FormTag::AStar || t == FormTag::BStar; }
bool right(FormTag t) { return t == FormTag::B || t == FormTag::BStar; }

double block_norm(const Eigen::VectorXd& r, int begin, int count) {
  return count > 0 ? r.segment(begin, count).cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

std::string to_string(const DualVariant& v) {
  return std::string(to_string(v.theta)) + "," + std::string(to_string(v.phi));
}

DualVariant dual_variant_from_string(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw Error(ErrorCode::InvalidForm, "variant must look like 'a,b_star', got '" + std::string(text) + "'");
  }
  return {form_tag_from_string(text.substr(0, comma)), form_tag_from_string(text.substr(comma + 1))};
}

double BlockResiduals::max() const {
  double m = 0.0;
  for (const auto& [name, value] : blocks) m = std::max(m, value);
  return m;
}

double BlockResiduals::at(std::string_view name) const {
  for (const auto& [key, value] : blocks) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::NotFound, "no residual block '" + std::string(name) + "'");
}

PontryaginSystem::PontryaginSystem(const OcpDefinition& ocp, const BirkhoffSystem& sys,
                                   DualVariant variant)
    : ocp_(ocp), sys_(sys), variant_(variant), N_(sys.order()), n_(ocp.n_x), m_(ocp.n_u),
      ne_(ocp.n_e()) {
  check_definition(ocp_);
}

PontryaginSystem::Offsets PontryaginSystem::offsets() const { return {N_ + 1, n_, m_, ne_}; }

int PontryaginSystem::unknowns() const { return offsets().total(); }

Eigen::VectorXd PontryaginSystem::pack(const PrimalSolution& p, const DualTrajectory& d) const {
  const Offsets o = offsets();
  if (p.X.rows() != n_ || p.X.cols() != o.P || p.U.rows() != m_ || p.V.cols() != o.P ||
      d.Lambda.rows() != n_ || d.Lambda.cols() != o.P || d.Omega.cols() != o.P ||
      d.lambda_a.size() != n_ || d.lambda_b.size() != n_ || d.nu.size() != ne_) {
    throw Error(ErrorCode::ShapeError, "primal/dual shapes do not match the Pontryagin system");
  }
  Eigen::VectorXd y(o.total());
  for (int k = 0; k < o.P; ++k) {
    for (int i = 0; i < n_; ++i) {
      y[o.X(i, k)] = p.X(i, k);
      y[o.V(i, k)] = p.V(i, k);
      y[o.Lam(i, k)] = d.Lambda(i, k);
      y[o.Om(i, k)] = d.Omega(i, k);
    }
    for (int c = 0; c < m_; ++c) y[o.U(c, k)] = p.U(c, k);
  }
  for (int i = 0; i < n_; ++i) {
    y[o.xa(i)] = p.x_a[i];
    y[o.xb(i)] = p.x_b[i];
    y[o.la(i)] = d.lambda_a[i];
    y[o.lb(i)] = d.lambda_b[i];
  }
  for (int r = 0; r < ne_; ++r) y[o.nu(r)] = d.nu[r];
  return y;
}

std::pair<PrimalSolution, DualTrajectory> PontryaginSystem::unpack(const Eigen::VectorXd& y) const {
  const Offsets o = offsets();
  if (y.size() != o.total()) throw Error(ErrorCode::ShapeError, "wrong Pontryagin vector length");
  PrimalSolution p;
  DualTrajectory d;
  p.X.resize(n_, o.P);
  p.U.resize(m_, o.P);
  p.V.resize(n_, o.P);
  d.Lambda.resize(n_, o.P);
  d.Omega.resize(n_, o.P);
  p.x_a.resize(n_);
  p.x_b.resize(n_);
  d.lambda_a.resize(n_);
  d.lambda_b.resize(n_);
  d.nu.resize(ne_);
  for (int k = 0; k < o.P; ++k) {
    for (int i = 0; i < n_; ++i) {
      p.X(i, k) = y[o.X(i, k)];
      p.V(i, k) = y[o.V(i, k)];
      d.Lambda(i, k) = y[o.Lam(i, k)];
      d.Omega(i, k) = y[o.Om(i, k)];
    }
    for (int c = 0; c < m_; ++c) p.U(c, k) = y[o.U(c, k)];
  }
  for (int i = 0; i < n_; ++i) {
    p.x_a[i] = y[o.xa(i)];
    p.x_b[i] = y[o.xb(i)];
    d.lambda_a[i] = y[o.la(i)];
    d.lambda_b[i] = y[o.lb(i)];
  }
  for (int r = 0; r < ne_; ++r) d.nu[r] = y[o.nu(r)];
  p.objective = ocp_.E(p.x_a, p.x_b);
  p.equivalency_residual = (p.x_b - p.x_a - p.V * sys_.weights()).cwiseAbs().maxCoeff();
  return {p, d};
}

Eigen::VectorXd PontryaginSystem::residual(const Eigen::VectorXd& y) const {
  const Offsets o = offsets();
  const auto [p, d] = unpack(y);
  const Eigen::VectorXd& w = sys_.weights();
  const Eigen::MatrixXd& Bs = right(variant_.theta) ? sys_.B_b() : sys_.B_a();
  const Eigen::MatrixXd& Bc = right(variant_.phi) ? sys_.B_b() : sys_.B_a();
  const Eigen::VectorXd& xanchor = right(variant_.theta) ? p.x_b : p.x_a;
  const Eigen::VectorXd& lanchor = right(variant_.phi) ? d.lambda_b : d.lambda_a;
  const Eigen::MatrixXd BV = p.V * Bs.transpose();
  const Eigen::MatrixXd BO = d.Omega * Bc.transpose();

  Eigen::VectorXd F(o.total());
  for (int k = 0; k < o.P; ++k) {
    const double st = starred(variant_.theta) ? w[k] : 1.0;
    const double sp = starred(variant_.phi) ? w[k] : 1.0;
    const Eigen::VectorXd xk = p.X.col(k);
    const Eigen::VectorXd uk = p.U.col(k);
    const Eigen::VectorXd fk = ocp_.f(xk, uk);
    if (!fk.allFinite()) throw Error(ErrorCode::EvaluationError, "non-finite dynamics at node " + std::to_string(k));
    const Eigen::VectorXd adj = ocp_.f_x(xk, uk).transpose() * d.Lambda.col(k);
    const Eigen::VectorXd ctl = ocp_.f_u(xk, uk).transpose() * d.Lambda.col(k);
    for (int i = 0; i < n_; ++i) {
      F[o.r_state(i, k)] = st * (xanchor[i] + BV(i, k) - p.X(i, k));
      F[o.r_costate(i, k)] = sp * (lanchor[i] + BO(i, k) - d.Lambda(i, k));
      F[o.r_dyn(i, k)] = st * (fk[i] - p.V(i, k));
      F[o.r_adj(i, k)] = sp * (d.Omega(i, k) + adj[i]);
    }
    for (int c = 0; c < m_; ++c) F[o.r_ctrl(c, k)] = sp * ctl[c];
  }
  const Eigen::VectorXd Ow = d.Omega * w;
  const Eigen::VectorXd Vw = p.V * w;
  Eigen::VectorXd gE = ocp_.E_grad(p.x_a, p.x_b);
  for (int r = 0; r < ne_; ++r) {
    const auto& c = ocp_.constraints[static_cast<std::size_t>(r)];
    F[o.r_end(r)] = c.value(p.x_a, p.x_b);
    gE += d.nu[r] * c.grad(p.x_a, p.x_b);
  }
  for (int i = 0; i < n_; ++i) {
    F[o.r_ceq(i)] = d.lambda_b[i] - d.lambda_a[i] - Ow[i];
    F[o.r_seq(i)] = p.x_b[i] - p.x_a[i] - Vw[i];
    F[o.r_ta(i)] = d.lambda_a[i] + gE[i];
    F[o.r_tb(i)] = d.lambda_b[i] - gE[n_ + i];
  }
  return F;
}

Eigen::MatrixXd PontryaginSystem::jacobian(const Eigen::VectorXd& y) const {
  const Offsets o = offsets();
  const auto [p, d] = unpack(y);
  const Eigen::VectorXd& w = sys_.weights();
  const Eigen::MatrixXd& Bs = right(variant_.theta) ? sys_.B_b() : sys_.B_a();
  const Eigen::MatrixXd& Bc = right(variant_.phi) ? sys_.B_b() : sys_.B_a();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(o.total(), o.total());

  for (int k = 0; k < o.P; ++k) {
    const double st = starred(variant_.theta) ? w[k] : 1.0;
    const double sp = starred(variant_.phi) ? w[k] : 1.0;
    const Eigen::VectorXd xk = p.X.col(k);
    const Eigen::VectorXd uk = p.U.col(k);
    const Eigen::MatrixXd fx = ocp_.f_x(xk, uk);
    const Eigen::MatrixXd fu = ocp_.f_u(xk, uk);
    const Eigen::MatrixXd Hk = dynamics_hessian(ocp_, xk, uk, d.Lambda.col(k));
    auto xu_col = [&](int q) { return q < n_ ? o.X(q, k) : o.U(q - n_, k); };
    for (int i = 0; i < n_; ++i) {
      const int rs = o.r_state(i, k);
      J(rs, right(variant_.theta) ? o.xb(i) : o.xa(i)) += st;
      for (int j = 0; j < o.P; ++j) J(rs, o.V(i, j)) += st * Bs(k, j);
      J(rs, o.X(i, k)) -= st;

      const int rc = o.r_costate(i, k);
      J(rc, right(variant_.phi) ? o.lb(i) : o.la(i)) += sp;
      for (int j = 0; j < o.P; ++j) J(rc, o.Om(i, j)) += sp * Bc(k, j);
      J(rc, o.Lam(i, k)) -= sp;

      const int rd = o.r_dyn(i, k);
      for (int l = 0; l < n_; ++l) J(rd, o.X(l, k)) += st * fx(i, l);
      for (int c = 0; c < m_; ++c) J(rd, o.U(c, k)) += st * fu(i, c);
      J(rd, o.V(i, k)) -= st;

      const int ra = o.r_adj(i, k);
      J(ra, o.Om(i, k)) += sp;
      for (int l = 0; l < n_; ++l) J(ra, o.Lam(l, k)) += sp * fx(l, i);
      for (int q = 0; q < n_ + m_; ++q) J(ra, xu_col(q)) += sp * Hk(i, q);
    }
    for (int c = 0; c < m_; ++c) {
      const int rr = o.r_ctrl(c, k);
      for (int l = 0; l < n_; ++l) J(rr, o.Lam(l, k)) += sp * fu(l, c);
      for (int q = 0; q < n_ + m_; ++q) J(rr, xu_col(q)) += sp * Hk(n_ + c, q);
    }
  }

  Eigen::MatrixXd Hbar = cost_hessian(ocp_, p.x_a, p.x_b);
  std::vector<Eigen::VectorXd> grads;
  for (int r = 0; r < ne_; ++r) {
    const auto& c = ocp_.constraints[static_cast<std::size_t>(r)];
    grads.push_back(c.grad(p.x_a, p.x_b));
    if (d.nu[r] != 0.0) Hbar += d.nu[r] * constraint_hessian(ocp_, r, p.x_a, p.x_b);
  }
  auto ab_col = [&](int q) { return q < n_ ? o.xa(q) : o.xb(q - n_); };
  for (int i = 0; i < n_; ++i) {
    J(o.r_ceq(i), o.lb(i)) += 1.0;
    J(o.r_ceq(i), o.la(i)) -= 1.0;
    for (int j = 0; j < o.P; ++j) J(o.r_ceq(i), o.Om(i, j)) -= w[j];
    J(o.r_seq(i), o.xb(i)) += 1.0;
    J(o.r_seq(i), o.xa(i)) -= 1.0;
    for (int j = 0; j < o.P; ++j) J(o.r_seq(i), o.V(i, j)) -= w[j];

    J(o.r_ta(i), o.la(i)) += 1.0;
    J(o.r_tb(i), o.lb(i)) += 1.0;
    for (int q = 0; q < 2 * n_; ++q) {
      J(o.r_ta(i), ab_col(q)) += Hbar(i, q);
      J(o.r_tb(i), ab_col(q)) -= Hbar(n_ + i, q);
    }
    for (int r = 0; r < ne_; ++r) {
      J(o.r_ta(i), o.nu(r)) += grads[static_cast<std::size_t>(r)][i];
      J(o.r_tb(i), o.nu(r)) -= grads[static_cast<std::size_t>(r)][n_ + i];
    }
  }
  for (int r = 0; r < ne_; ++r) {
    for (int q = 0; q < 2 * n_; ++q) J(o.r_end(r), ab_col(q)) += grads[static_cast<std::size_t>(r)][q];
  }
  return J;
}

BlockResiduals PontryaginSystem::blocks(const PrimalSolution& p, const DualTrajectory& d) const {
  const Offsets o = offsets();
  const Eigen::VectorXd F = residual(pack(p, d));
  BlockResiduals out;
  const int nP = n_ * o.P;
  out.blocks.emplace_back("state-interpolation", block_norm(F, o.r_state(0, 0), nP));
  out.blocks.emplace_back("costate-interpolation", block_norm(F, o.r_costate(0, 0), nP));
  out.blocks.emplace_back("dynamics", block_norm(F, o.r_dyn(0, 0), nP));
  out.blocks.emplace_back("adjoint", block_norm(F, o.r_adj(0, 0), nP));
  out.blocks.emplace_back("control-stationarity", block_norm(F, 4 * nP, m_ * o.P));
  out.blocks.emplace_back("costate-equivalency", block_norm(F, o.r_ceq(0), n_));
  out.blocks.emplace_back("state-equivalency", block_norm(F, o.r_seq(0), n_));
  double endpoint = 0.0;
  double complementarity = 0.0;
  for (int r = 0; r < ne_; ++r) {
    const double e = F[o.r_end(r)];
    if (ocp_.constraints[static_cast<std::size_t>(r)].kind == ConstraintKind::Equality) {
      endpoint = std::max(endpoint, std::abs(e));
    } else {
      endpoint = std::max(endpoint, std::max(e, 0.0));
      complementarity = std::max({complementarity, std::abs(d.nu[r] * e), -d.nu[r]});
    }
  }
  out.blocks.emplace_back("endpoint", endpoint);
  out.blocks.emplace_back("transversality-a", block_norm(F, o.r_ta(0), n_));
  out.blocks.emplace_back("transversality-b", block_norm(F, o.r_tb(0), n_));
  out.blocks.emplace_back("complementarity", complementarity);
  return out;
}

}  // namespace birkhoff
