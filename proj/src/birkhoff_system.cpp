#include "birkhoff/birkhoff_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "birkhoff/chebyshev.hpp"
#include "birkhoff/error.hpp"

namespace birkhoff {

namespace {

constexpr double kTransformTolerance = 1e-10;
constexpr double kWeightCrossCheck = 1e-12;

// Rows k = 0..N of P_k evaluated at each point.
Eigen::MatrixXd legendre_table(std::span<const double> x, int N) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd P(N + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    P(0, j) = 1.0;
    if (N >= 1) P(1, j) = xj;
    for (int k = 2; k <= N; ++k) {
      P(k, j) = ((2.0 * k - 1.0) * xj * P(k - 1, j) - (k - 1.0) * P(k - 2, j)) / k;
    }
  }
  return P;
}

// LGL: discrete Legendre transform (exact for degree N with the Lobatto norm correction
// on the last mode), then values at CGL points, then DCT-I.
Eigen::MatrixXd lgl_lagrange_coefficients(std::span<const double> s, int N) {
  const Eigen::MatrixXd P = legendre_table(s, N);
  Eigen::MatrixXd leg(N + 1, N + 1);
  for (int j = 0; j <= N; ++j) {
    const double pn = P(N, j);
    const double wj = 2.0 / (N * (N + 1.0) * pn * pn);
    for (int k = 0; k <= N; ++k) {
      const double gamma = (k == N) ? 2.0 / N : 2.0 / (2.0 * k + 1.0);
      leg(k, j) = wj * P(k, j) / gamma;
    }
  }
  const std::vector<double> cgl = cgl_reference_nodes(N);
  const Eigen::MatrixXd values = legendre_table(cgl, N).transpose() * leg;
  return chebyshev::cgl_values_to_coefficients(N) * values;
}

Eigen::MatrixXd lagrange_coefficients(const Grid& grid) {
  const int N = grid.order();
  const auto s = grid.reference_nodes();
  switch (grid.kind()) {
    case GridKind::ChebyshevGaussLobatto:
      return chebyshev::cgl_values_to_coefficients(N);
    case GridKind::LegendreGaussLobatto:
      return lgl_lagrange_coefficients(s, N);
    case GridKind::Uniform:
    case GridKind::Custom:
      break;
  }
  const Eigen::MatrixXd T = chebyshev::vandermonde(s, N);
  return T.partialPivLu().solve(Eigen::MatrixXd::Identity(N + 1, N + 1));
}

// Reference coordinate, snapping the endpoints so anchored evaluations are exact.
double reference_coordinate(const Grid& grid, double t) {
  const Domain& d = grid.domain();
  if (!(t >= d.lower && t <= d.upper)) {
    throw Error(ErrorCode::DomainError, "evaluation point " + format_double(t) +
                                            " outside [" + format_double(d.lower) + ", " +
                                            format_double(d.upper) + "]");
  }
  if (t == d.lower) return -1.0;
  if (t == d.upper) return 1.0;
  return grid.affine_map().to_reference(t);
}

Eigen::VectorXd combined_series(const BirkhoffSystem& sys, std::span<const double> values) {
  if (static_cast<int>(values.size()) != sys.size()) {
    throw Error(ErrorCode::ShapeError, "expected " + std::to_string(sys.size()) +
                                           " node values, got " + std::to_string(values.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  return sys.modal().antiderivative * v;
}

}  // namespace

BirkhoffSystem::BirkhoffSystem(Grid grid, ModalBasis modal, Eigen::MatrixXd B_a,
                               Eigen::MatrixXd B_b, Eigen::VectorXd weights, Eigen::MatrixXd D)
    : grid_(std::move(grid)), modal_(std::move(modal)), B_a_(std::move(B_a)),
      B_b_(std::move(B_b)), w_(std::move(weights)), D_(std::move(D)) {}

double BirkhoffSystem::basis_value(int j, double t, bool right_anchored) const {
  const double s = reference_coordinate(grid_, t);
  const auto col = modal_.antiderivative.col(j);
  const double h = grid_.affine_map().scale;
  if (right_anchored) return s == 1.0 ? 0.0 : h * (chebyshev::evaluate(col, s) - col.sum());
  return s == -1.0 ? 0.0 : h * chebyshev::evaluate(col, s);
}

Eigen::VectorXd barycentric_weights(std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd logs(n);
  Eigen::VectorXd signs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    double sign = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double diff = x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(k)];
      acc -= std::log(std::abs(diff));
      if (diff < 0.0) sign = -sign;
    }
    logs[j] = acc;
    signs[j] = sign;
  }
  const double top = logs.maxCoeff();
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = signs[j] * std::exp(logs[j] - top);
  return w;
}

Eigen::MatrixXd build_diff_matrix(const Grid& grid) {
  const auto s = grid.reference_nodes();
  const Eigen::VectorXd bw = barycentric_weights(s);
  const Eigen::Index n = bw.size();
  const double h = grid.affine_map().scale;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = (bw[j] / bw[i]) /
                         (s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(j)]);
      D(i, j) = dij / h;
      diag -= dij;
    }
    D(i, i) = diag / h;
  }
  return D;
}

BirkhoffSystem build_birkhoff(const Grid& grid) {
  if (!grid.includes_endpoints()) {
    throw Error(ErrorCode::UnsupportedGrid, "Birkhoff matrices need an endpoint-inclusive grid");
  }
  const int N = grid.order();
  if (N > kMaxBirkhoffOrder) {
    throw Error(ErrorCode::InvalidOrder, "N = " + std::to_string(N) + " exceeds the cap of " +
                                             std::to_string(kMaxBirkhoffOrder));
  }
  const auto s = grid.reference_nodes();

  ModalBasis modal;
  modal.lagrange = lagrange_coefficients(grid);
  const Eigen::MatrixXd Tn = chebyshev::vandermonde(s, N);
  modal.transform_residual =
      (Tn * modal.lagrange - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff();
  if (!(modal.transform_residual <= kTransformTolerance)) {
    throw Error(ErrorCode::IllConditionedBasis,
                "modal transform residual " + format_double(modal.transform_residual) +
                    " exceeds 1e-10 (" + std::string(to_string(grid.kind())) +
                    ", N = " + std::to_string(N) + ")");
  }
  modal.antiderivative.resize(N + 2, N + 1);
  for (int j = 0; j <= N; ++j) modal.antiderivative.col(j) = chebyshev::antiderivative(modal.lagrange.col(j));

  const double h = grid.affine_map().scale;
  Eigen::MatrixXd B_a = chebyshev::vandermonde(s, N + 1) * modal.antiderivative;
  B_a.row(0).setZero();

  Eigen::VectorXd w(N + 1);
  for (int j = 0; j <= N; ++j) w[j] = chebyshev::evaluate(modal.antiderivative.col(j), 1.0);
  const double mismatch = (B_a.row(N).transpose() - w).cwiseAbs().maxCoeff();
  if (!(mismatch <= kWeightCrossCheck * std::max(1.0, h))) {
    throw Error(ErrorCode::IllConditionedBasis,
                "last Birkhoff row differs from the weights by " + format_double(mismatch));
  }
  B_a.row(N) = w.transpose();

  B_a *= h;
  w *= h;
  Eigen::MatrixXd B_b = B_a - Eigen::VectorXd::Ones(N + 1) * w.transpose();
  B_b.row(N).setZero();
  return BirkhoffSystem(grid, std::move(modal), std::move(B_a), std::move(B_b), std::move(w),
                        build_diff_matrix(grid));
}

double quadrature(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) {
    throw Error(ErrorCode::ShapeError, "quadrature: " + std::to_string(weights.size()) +
                                           " weights vs " + std::to_string(values.size()) +
                                           " values");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * values[j];
  return acc;
}

double quadrature(const Eigen::VectorXd& weights, const Eigen::VectorXd& values) {
  return quadrature(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())),
                    std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double eval_state_interpolant(double x_a, std::span<const double> V, const BirkhoffSystem& sys,
                              double t) {
  const double s = reference_coordinate(sys.grid(), t);
  const Eigen::VectorXd c = combined_series(sys, V);
  if (s == -1.0) return x_a;
  return x_a + sys.grid().affine_map().scale * chebyshev::evaluate(c, s);
}

double eval_costate_interpolant(double lambda_b, std::span<const double> Omega,
                                const BirkhoffSystem& sys, double t) {
  const double s = reference_coordinate(sys.grid(), t);
  const Eigen::VectorXd c = combined_series(sys, Omega);
  if (s == 1.0) return lambda_b;
  return lambda_b + sys.grid().affine_map().scale * (chebyshev::evaluate(c, s) - c.sum());
}

Eigen::MatrixXd integration_by_parts_defect(const BirkhoffSystem& sys) {
  const auto W = sys.weights().asDiagonal();
  return W * sys.B_b() + sys.B_a().transpose() * W;
}

double integration_by_parts_norm(const BirkhoffSystem& sys) {
  return integration_by_parts_defect(sys).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace birkhoff
