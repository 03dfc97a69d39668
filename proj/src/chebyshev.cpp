#include "birkhoff/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace birkhoff::chebyshev {

Eigen::MatrixXd vandermonde(std::span<const double> x, int degree) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd T(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    T(i, 0) = 1.0;
    if (degree >= 1) T(i, 1) = xi;
    for (int k = 2; k <= degree; ++k) T(i, k) = 2.0 * xi * T(i, k - 1) - T(i, k - 2);
  }
  return T;
}

double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double x) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * x * b1 - b2 + coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + (coeffs.size() > 0 ? coeffs[0] : 0.0);
}

Eigen::VectorXd antiderivative(const Eigen::Ref<const Eigen::VectorXd>& a) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  auto coef = [&](Eigen::Index k) { return k < n ? a[k] : 0.0; };
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double lower = (k == 1 ? 2.0 : 1.0) * coef(k - 1);
    b[k] = (lower - coef(k + 1)) / (2.0 * static_cast<double>(k));
  }
  // F(-1) = b_0 + sum_k (-1)^k b_k = 0
  double alternating = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) alternating += (k % 2 == 0 ? 1.0 : -1.0) * b[k];
  b[0] = -alternating;
  return b;
}

Eigen::VectorXd derivative(const Eigen::Ref<const Eigen::VectorXd>& a) {
  const Eigen::Index n = a.size();
  if (n <= 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n - 1);
  // d_{k-1} = d_{k+1} + 2k a_k, then halve d_0.
  double dk1 = 0.0;  // d_{k+1}
  double dk = 0.0;   // d_k
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    const double dkm1 = dk1 + 2.0 * static_cast<double>(k) * a[k];
    d[k - 1] = dkm1;
    dk1 = dk;
    dk = dkm1;
  }
  d[0] *= 0.5;
  return d;
}

Eigen::MatrixXd cgl_values_to_coefficients(int N) {
  Eigen::MatrixXd C(N + 1, N + 1);
  const long two_n = 2L * N;
  for (int k = 0; k <= N; ++k) {
    const double k_scale = (k == 0 || k == N) ? 0.5 : 1.0;
    for (int j = 0; j <= N; ++j) {
      const int m = N - j;  // descending-cosine index of ascending node j
      const double m_scale = (m == 0 || m == N) ? 0.5 : 1.0;
      const long r = (static_cast<long>(k) * m) % two_n;
      C(k, j) = (2.0 / N) * k_scale * m_scale * std::cos(std::numbers::pi * r / N);
    }
  }
  return C;
}

}  // namespace birkhoff::chebyshev
