#include "birkhoff/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "birkhoff/error.hpp"

namespace birkhoff {

namespace {

constexpr double kHessianStep = 1e-5;
constexpr double kJacobianStep = 1e-6;

double step_for(double v, double base) { return base * std::max(1.0, std::abs(v)); }

// Central-difference Jacobian of a vector map g: R^n -> R^m.
template <class G>
Eigen::MatrixXd fd_jacobian(G&& g, const Eigen::VectorXd& z, double base) {
  const Eigen::VectorXd g0 = g(z);
  Eigen::MatrixXd J(g0.size(), z.size());
  Eigen::VectorXd zp = z;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double h = step_for(z[k], base);
    zp[k] = z[k] + h;
    const Eigen::VectorXd gp = g(zp);
    zp[k] = z[k] - h;
    const Eigen::VectorXd gm = g(zp);
    zp[k] = z[k];
    J.col(k) = (gp - gm) / (2.0 * h);
  }
  return J;
}

template <class G>
Eigen::VectorXd fd_gradient(G&& g, const Eigen::VectorXd& z, double base) {
  auto wrapped = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd::Constant(1, g(v)); };
  return fd_jacobian(wrapped, z, base).row(0).transpose();
}

Eigen::VectorXd head(const Eigen::VectorXd& z, int n) { return z.head(n); }
Eigen::VectorXd tail(const Eigen::VectorXd& z, int n) { return z.tail(n); }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& H) { return 0.5 * (H + H.transpose()); }

EndpointConstraint fixed_state(std::string label, int n_x, int i, double value, bool initial) {
  EndpointConstraint c;
  c.label = std::move(label);
  c.kind = ConstraintKind::Equality;
  const int offset = initial ? 0 : n_x;
  c.value = [i, value, initial](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
    return (initial ? xa[i] : xb[i]) - value;
  };
  c.grad = [n_x, i, offset](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n_x);
    g[offset + i] = 1.0;
    return g;
  };
  c.hess = [n_x](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(2 * n_x, 2 * n_x).eval();
  };
  return c;
}

double relative_error(const Eigen::MatrixXd& given, const Eigen::MatrixXd& reference) {
  if (given.size() == 0) return 0.0;
  const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
  return (given - reference).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

int OcpDefinition::n_eq() const {
  return static_cast<int>(std::count_if(constraints.begin(), constraints.end(), [](const auto& c) {
    return c.kind == ConstraintKind::Equality;
  }));
}

int OcpDefinition::n_in() const { return n_e() - n_eq(); }

OcpDefinition make_ocp(std::string name, int n_x, int n_u, double t0, double tf) {
  OcpDefinition ocp;
  ocp.name = std::move(name);
  ocp.n_x = n_x;
  ocp.n_u = n_u;
  ocp.t0 = t0;
  ocp.tf = tf;
  ocp.E = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; };
  ocp.E_grad = [n_x](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(2 * n_x).eval();
  };
  ocp.E_hess = [n_x](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(2 * n_x, 2 * n_x).eval();
  };
  ocp.initial_hint.assign(static_cast<std::size_t>(n_x), std::nullopt);
  ocp.final_hint.assign(static_cast<std::size_t>(n_x), std::nullopt);
  return ocp;
}

void fix_initial_state(OcpDefinition& ocp, int i, double value) {
  ocp.constraints.push_back(
      fixed_state("x" + std::to_string(i) + "(t0)", ocp.n_x, i, value, true));
  ocp.initial_hint[static_cast<std::size_t>(i)] = value;
}

void fix_final_state(OcpDefinition& ocp, int i, double value) {
  ocp.constraints.push_back(
      fixed_state("x" + std::to_string(i) + "(tf)", ocp.n_x, i, value, false));
  ocp.final_hint[static_cast<std::size_t>(i)] = value;
}

void check_definition(const OcpDefinition& ocp) {
  if (ocp.n_x < 1 || ocp.n_u < 0) throw Error(ErrorCode::InvalidConfig, "bad problem dimensions");
  if (!std::isfinite(ocp.t0) || !std::isfinite(ocp.tf) || !(ocp.tf > ocp.t0)) {
    throw Error(ErrorCode::InvalidDomain, "horizon must be finite with tf > t0");
  }
  if (!ocp.f || !ocp.f_x || !ocp.f_u || !ocp.E || !ocp.E_grad) {
    throw Error(ErrorCode::IncompleteDerivatives, "problem '" + ocp.name +
                                                      "' is missing dynamics, Jacobians or cost");
  }
  for (const auto& c : ocp.constraints) {
    if (!c.value || !c.grad) {
      throw Error(ErrorCode::IncompleteDerivatives, "constraint '" + c.label + "' lacks a gradient");
    }
  }
  if (ocp.initial_hint.size() != static_cast<std::size_t>(ocp.n_x) ||
      ocp.final_hint.size() != static_cast<std::size_t>(ocp.n_x)) {
    throw Error(ErrorCode::ShapeError, "endpoint hints must have n_x entries");
  }
}

Eigen::MatrixXd dynamics_hessian(const OcpDefinition& ocp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& lambda) {
  if (ocp.f_hess) return ocp.f_hess(x, u, lambda);
  const int n_x = ocp.n_x;
  const int n_u = ocp.n_u;
  auto grad = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd xz = head(z, n_x);
    const Eigen::VectorXd uz = tail(z, n_u);
    Eigen::VectorXd g(n_x + n_u);
    g.head(n_x) = ocp.f_x(xz, uz).transpose() * lambda;
    g.tail(n_u) = ocp.f_u(xz, uz).transpose() * lambda;
    return g;
  };
  Eigen::VectorXd z(n_x + n_u);
  z << x, u;
  return symmetrized(fd_jacobian(grad, z, kHessianStep));
}

Eigen::MatrixXd cost_hessian(const OcpDefinition& ocp, const Eigen::VectorXd& x_a,
                             const Eigen::VectorXd& x_b) {
  if (ocp.E_hess) return ocp.E_hess(x_a, x_b);
  const int n = ocp.n_x;
  auto grad = [&](const Eigen::VectorXd& z) { return ocp.E_grad(head(z, n), tail(z, n)); };
  Eigen::VectorXd z(2 * n);
  z << x_a, x_b;
  return symmetrized(fd_jacobian(grad, z, kHessianStep));
}

Eigen::MatrixXd constraint_hessian(const OcpDefinition& ocp, int row, const Eigen::VectorXd& x_a,
                                   const Eigen::VectorXd& x_b) {
  const auto& c = ocp.constraints.at(static_cast<std::size_t>(row));
  if (c.hess) return c.hess(x_a, x_b);
  const int n = ocp.n_x;
  auto grad = [&](const Eigen::VectorXd& z) { return c.grad(head(z, n), tail(z, n)); };
  Eigen::VectorXd z(2 * n);
  z << x_a, x_b;
  return symmetrized(fd_jacobian(grad, z, kHessianStep));
}

OcpDefinition augment_running_cost(const OcpDefinition& ocp, const RunningCost& cost) {
  if (!cost.L || !cost.grad) {
    throw Error(ErrorCode::IncompleteDerivatives, "running cost needs L and its gradient");
  }
  check_definition(ocp);
  const int n = ocp.n_x;
  const int m = ocp.n_u;
  OcpDefinition aug = ocp;
  aug.n_x = n + 1;

  aug.f = [f = ocp.f, L = cost.L, n](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const Eigen::VectorXd xs = x.head(n);
    Eigen::VectorXd out(n + 1);
    out.head(n) = f(xs, u);
    out[n] = L(xs, u);
    return out;
  };
  aug.f_x = [fx = ocp.f_x, g = cost.grad, n](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const Eigen::VectorXd xs = x.head(n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = fx(xs, u);
    J.block(n, 0, 1, n) = g(xs, u).head(n).transpose();
    return J;
  };
  aug.f_u = [fu = ocp.f_u, g = cost.grad, n, m](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const Eigen::VectorXd xs = x.head(n);
    Eigen::MatrixXd J(n + 1, m);
    J.topRows(n) = fu(xs, u);
    J.row(n) = g(xs, u).tail(m).transpose();
    return J;
  };
  // lambda^T f_aug = lambda_{0:n}^T f + lambda_n L; the cost state enters nothing.
  aug.f_hess = [ocp, cost, n, m](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& lambda) {
    const Eigen::VectorXd xs = x.head(n);
    const Eigen::MatrixXd Hf = dynamics_hessian(ocp, xs, u, lambda.head(n));
    Eigen::MatrixXd HL;
    if (cost.hess) {
      HL = cost.hess(xs, u);
    } else {
      auto grad = [&](const Eigen::VectorXd& z) { return cost.grad(head(z, n), tail(z, m)); };
      Eigen::VectorXd z(n + m);
      z << xs, u;
      HL = symmetrized(fd_jacobian(grad, z, kHessianStep));
    }
    const Eigen::MatrixXd Hxu = Hf + lambda[n] * HL;
    // Re-embed with a zero row/column for the cost state.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + 1 + m, n + 1 + m);
    H.topLeftCorner(n, n) = Hxu.topLeftCorner(n, n);
    H.block(0, n + 1, n, m) = Hxu.topRightCorner(n, m);
    H.block(n + 1, 0, m, n) = Hxu.bottomLeftCorner(m, n);
    H.bottomRightCorner(m, m) = Hxu.bottomRightCorner(m, m);
    return H;
  };

  // Endpoint callbacks see (x_a, x_b) of size n+1; strip the cost state for the originals.
  auto strip_grad = [n](const Eigen::VectorXd& g) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * (n + 1));
    out.head(n) = g.head(n);
    out.segment(n + 1, n) = g.tail(n);
    return out;
  };
  auto strip_hess = [n](const Eigen::MatrixXd& H) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * (n + 1), 2 * (n + 1));
    const int idx[2] = {0, n + 1};
    for (int bi = 0; bi < 2; ++bi) {
      for (int bj = 0; bj < 2; ++bj) out.block(idx[bi], idx[bj], n, n) = H.block(bi * n, bj * n, n, n);
    }
    return out;
  };

  aug.E = [E = ocp.E, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
    return E(xa.head(n), xb.head(n)) + xb[n];
  };
  aug.E_grad = [Eg = ocp.E_grad, strip_grad, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
    Eigen::VectorXd g = strip_grad(Eg(xa.head(n), xb.head(n)));
    g[2 * n + 1] = 1.0;
    return g;
  };
  aug.E_hess = [ocp, strip_hess, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
    return strip_hess(cost_hessian(ocp, xa.head(n), xb.head(n)));
  };

  aug.constraints.clear();
  for (int r = 0; r < ocp.n_e(); ++r) {
    const auto& c = ocp.constraints[static_cast<std::size_t>(r)];
    EndpointConstraint a;
    a.label = c.label;
    a.kind = c.kind;
    a.value = [v = c.value, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
      return v(xa.head(n), xb.head(n));
    };
    a.grad = [g = c.grad, strip_grad, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
      return strip_grad(g(xa.head(n), xb.head(n)));
    };
    a.hess = [ocp, r, strip_hess, n](const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
      return strip_hess(constraint_hessian(ocp, r, xa.head(n), xb.head(n)));
    };
    aug.constraints.push_back(std::move(a));
  }
  aug.initial_hint.push_back(std::nullopt);
  aug.final_hint.push_back(std::nullopt);
  fix_initial_state(aug, n, 0.0);
  aug.constraints.back().label = "cost(t0)";
  return aug;
}

ValidationReport validate(const OcpDefinition& ocp, int samples, unsigned seed) {
  ValidationReport report;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = ocp.n_x;
  const int m = ocp.n_u;
  auto random_vector = [&](int size) {
    Eigen::VectorXd v(size);
    for (int k = 0; k < size; ++k) v[k] = dist(rng);
    return v;
  };

  auto record = [&](const std::string& block, double err) {
    auto it = std::find_if(report.checks.begin(), report.checks.end(),
                           [&](const auto& c) { return c.block == block; });
    if (it == report.checks.end()) {
      report.checks.push_back({block, err, true});
      it = report.checks.end() - 1;
    }
    it->max_relative_error = std::max(it->max_relative_error, err);
    it->pass = it->max_relative_error <= report.tolerance;
  };

  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_vector(n);
    const Eigen::VectorXd u = random_vector(m);
    const Eigen::VectorXd xa = random_vector(n);
    const Eigen::VectorXd xb = random_vector(n);
    const Eigen::VectorXd lambda = random_vector(n);

    record("f_x", relative_error(ocp.f_x(x, u), fd_jacobian([&](const Eigen::VectorXd& v) {
                                   return ocp.f(v, u);
                                 }, x, kJacobianStep)));
    if (m > 0) {
      record("f_u", relative_error(ocp.f_u(x, u), fd_jacobian([&](const Eigen::VectorXd& v) {
                                     return ocp.f(x, v);
                                   }, u, kJacobianStep)));
    }
    if (ocp.f_hess) {
      OcpDefinition fd = ocp;
      fd.f_hess = nullptr;
      record("f_hess", relative_error(ocp.f_hess(x, u, lambda), dynamics_hessian(fd, x, u, lambda)));
    }

    Eigen::VectorXd z(2 * n);
    z << xa, xb;
    record("E_grad", relative_error(ocp.E_grad(xa, xb), fd_gradient([&](const Eigen::VectorXd& v) {
                                      return ocp.E(head(v, n), tail(v, n));
                                    }, z, kJacobianStep)));
    if (ocp.E_hess) {
      OcpDefinition fd = ocp;
      fd.E_hess = nullptr;
      record("E_hess", relative_error(ocp.E_hess(xa, xb), cost_hessian(fd, xa, xb)));
    }
    for (const auto& c : ocp.constraints) {
      record("e_grad[" + c.label + "]",
             relative_error(c.grad(xa, xb), fd_gradient([&](const Eigen::VectorXd& v) {
                              return c.value(head(v, n), tail(v, n));
                            }, z, kJacobianStep)));
      if (c.hess) {
        auto grad = [&](const Eigen::VectorXd& v) { return c.grad(head(v, n), tail(v, n)); };
        record("e_hess[" + c.label + "]",
               relative_error(c.hess(xa, xb), symmetrized(fd_jacobian(grad, z, kHessianStep))));
      }
    }
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const auto& c) { return c.pass; });
  return report;
}

}  // namespace birkhoff
