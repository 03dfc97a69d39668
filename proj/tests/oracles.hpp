#pragma once

// Independent reference computations for the tests. Nothing here calls into the library's
// numerics: Lagrange polynomials are evaluated from their product form, integrals by
// adaptive Gauss-Kronrod, derivatives by central differences.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// l_j(t) = prod_{m != j} (t - t_m) / (t_j - t_m).
inline double lagrange(const std::vector<double>& nodes, int j, double t) {
  double v = 1.0;
  for (int m = 0; m < static_cast<int>(nodes.size()); ++m) {
    if (m != j) v *= (t - nodes[m]) / (nodes[j] - nodes[m]);
  }
  return v;
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [a, b]; returns the Kronrod value and the error estimate.
inline std::pair<double, double> gk15(const std::function<double(double)>& f, double a, double b) {
  static const double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static const double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                               0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double f1 = f(c - h * xk[i]);
    const double f2 = f(c + h * xk[i]);
    kronrod += wk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  const auto [whole, err] = gk15(f, a, b);
  if (err <= tol || depth >= 40) return whole;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-15) {
  if (a == b) return 0.0;
  return detail::adapt(f, a, b, tol, 0);
}

/// B(i, j) = integral from `anchor` to t_i of l_j.
inline Eigen::MatrixXd birkhoff_matrix(const std::vector<double>& nodes, double anchor) {
  const int P = static_cast<int>(nodes.size());
  Eigen::MatrixXd B(P, P);
  for (int j = 0; j < P; ++j) {
    const auto lj = [&](double t) { return lagrange(nodes, j, t); };
    for (int i = 0; i < P; ++i) B(i, j) = integrate(lj, anchor, nodes[i]);
  }
  return B;
}

/// w_j = integral of l_j over [a, b].
inline Eigen::VectorXd weights(const std::vector<double>& nodes, double a, double b) {
  const int P = static_cast<int>(nodes.size());
  Eigen::VectorXd w(P);
  for (int j = 0; j < P; ++j) w[j] = integrate([&](double t) { return lagrange(nodes, j, t); }, a, b);
  return w;
}

/// D(i, j) = l_j'(t_i) by a fourth-order central difference of the product form.
inline Eigen::MatrixXd diff_matrix(const std::vector<double>& nodes, double h = 1e-4) {
  const int P = static_cast<int>(nodes.size());
  Eigen::MatrixXd D(P, P);
  for (int j = 0; j < P; ++j) {
    for (int i = 0; i < P; ++i) {
      const double t = nodes[i];
      D(i, j) = (-lagrange(nodes, j, t + 2 * h) + 8 * lagrange(nodes, j, t + h) -
                 8 * lagrange(nodes, j, t - h) + lagrange(nodes, j, t - 2 * h)) /
                (12 * h);
    }
  }
  return D;
}

/// Central-difference Jacobian of F at x.
inline Eigen::MatrixXd jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                                const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = F(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    J.col(c) = (F(xp) - F(xm)) / (2 * h);
  }
  return J;
}

/// Legendre polynomial P_k(x) by recurrence.
inline double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0, curr = x;
  for (int n = 2; n <= k; ++n) {
    const double next = ((2.0 * n - 1.0) * x * curr - (n - 1.0) * prev) / n;
    prev = curr;
    curr = next;
  }
  return curr;
}

}  // namespace oracle
