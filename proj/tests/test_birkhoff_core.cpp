#include <cmath>
#include <random>
#include <vector>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/chebyshev.hpp"
#include "birkhoff/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

std::vector<double> nodes_of(const BirkhoffSystem& sys) {
  const auto n = sys.grid().nodes();
  return {n.begin(), n.end()};
}

double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("B_a, B_b, w and D match the product-form oracle") {
  struct Case {
    GridKind kind;
    int N;
    Domain dom;
  };
  for (const Case& c : {Case{GridKind::LegendreGaussLobatto, 4, {0.0, 1.0}},
                        Case{GridKind::LegendreGaussLobatto, 12, {-1.0, 3.0}},
                        Case{GridKind::ChebyshevGaussLobatto, 9, {0.0, 2.0}},
                        Case{GridKind::Uniform, 6, {0.0, 1.0}}}) {
    CAPTURE(c.N);
    const BirkhoffSystem sys = build_birkhoff(make_grid(c.kind, c.N, c.dom));
    const auto t = nodes_of(sys);
    const Eigen::MatrixXd Ba = oracle::birkhoff_matrix(t, c.dom.lower);
    const Eigen::MatrixXd Bb = oracle::birkhoff_matrix(t, c.dom.upper);
    const Eigen::VectorXd w = oracle::weights(t, c.dom.lower, c.dom.upper);
    CHECK(max_abs(sys.B_a() - Ba) <= 1e-12);
    CHECK(max_abs(sys.B_b() - Bb) <= 1e-12);
    CHECK(max_abs(sys.weights() - w) <= 1e-12);
    const Eigen::MatrixXd D = oracle::diff_matrix(t, 1e-4 * c.dom.length());
    CHECK(max_abs(sys.D() - D) <= 1e-6 * std::max(1.0, max_abs(D)));
  }
}

TEST_CASE("custom grids with endpoints build") {
  const Grid g(GridKind::Custom, {0.0, 1.0}, {0.0, 0.2, 0.45, 0.8, 1.0});
  const BirkhoffSystem sys = build_birkhoff(g);
  const auto t = nodes_of(sys);
  CHECK(max_abs(sys.B_a() - oracle::birkhoff_matrix(t, 0.0)) <= 1e-12);
}

TEST_CASE("structural identities") {
  for (GridKind kind : {GridKind::LegendreGaussLobatto, GridKind::ChebyshevGaussLobatto}) {
    for (int N : {4, 16, 64}) {
      const BirkhoffSystem sys = build_birkhoff(make_grid(kind, N, {0.0, 3.0}));
      const Eigen::VectorXd& w = sys.weights();
      const Eigen::MatrixXd diff = sys.B_a() - sys.B_b() - Eigen::VectorXd::Ones(N + 1) * w.transpose();
      CHECK(max_abs(diff) <= 1e-12);
      CHECK(max_abs(sys.B_a().row(N).transpose() - w) <= 1e-12);
      CHECK(max_abs(sys.B_b().row(0).transpose() + w) <= 1e-12);
      CHECK(sys.B_a().row(0).cwiseAbs().maxCoeff() == 0.0);
      CHECK(std::abs(w.sum() - 3.0) <= 1e-12);
      CHECK((sys.D() * Eigen::VectorXd::Ones(N + 1)).cwiseAbs().maxCoeff() <= 1e-9 * N * N);
    }
  }
}

TEST_CASE("basis derivatives are the Lagrange cardinal functions") {
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 10, {0.0, 1.0}));
  const double h = 1e-4;
  auto B = [&](int j, double t) { return sys.basis_value(j, t, false); };
  for (int j = 0; j < sys.size(); ++j) {
    for (int i = 1; i < sys.size() - 1; ++i) {
      const double t = sys.grid().node(i);
      // fourth-order central stencil
      const double d = (8.0 * (B(j, t + h) - B(j, t - h)) - (B(j, t + 2 * h) - B(j, t - 2 * h))) / (12.0 * h);
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
  }
}

TEST_CASE("state interpolant agrees with the oracle between nodes") {
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::ChebyshevGaussLobatto, 8, {-1.0, 1.0}));
  const auto t = nodes_of(sys);
  std::vector<double> V(t.size());
  for (std::size_t j = 0; j < V.size(); ++j) V[j] = std::sin(3.0 * t[j]);
  const double xa = 0.7;
  for (double s : {-0.93, -0.2, 0.31, 0.77}) {
    double ref = xa;
    for (std::size_t j = 0; j < V.size(); ++j) {
      ref += V[j] * oracle::integrate([&](double x) { return oracle::lagrange(t, static_cast<int>(j), x); }, -1.0, s);
    }
    CHECK(eval_state_interpolant(xa, V, sys, s) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(eval_state_interpolant(xa, V, sys, -1.0) == xa);
  CHECK_THROWS_AS(eval_state_interpolant(xa, V, sys, 1.5), Error);
  CHECK(eval_costate_interpolant(2.0, V, sys, 1.0) == 2.0);
}

TEST_CASE("quadrature rules and shape errors") {
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 6, {0.0, 1.0}));
  Eigen::VectorXd f(sys.size());
  for (int k = 0; k < sys.size(); ++k) f[k] = std::pow(sys.grid().node(k), 5);
  CHECK(quadrature(sys.weights(), f) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(quadrature(sys.weights(), Eigen::VectorXd::Ones(3)), Error);
}

TEST_CASE("integration-by-parts defect matches the oracle matrices") {
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 8, {0.0, 2.0}));
  const auto t = nodes_of(sys);
  const Eigen::VectorXd w = oracle::weights(t, 0.0, 2.0);
  const Eigen::MatrixXd W = w.asDiagonal();
  const Eigen::MatrixXd ref = W * oracle::birkhoff_matrix(t, 2.0) + oracle::birkhoff_matrix(t, 0.0).transpose() * W;
  CHECK(max_abs(integration_by_parts_defect(sys) - ref) <= 1e-12);
  double row_sum = 0.0;
  for (int i = 0; i < ref.rows(); ++i) row_sum = std::max(row_sum, ref.row(i).cwiseAbs().sum());
  CHECK(integration_by_parts_norm(sys) == doctest::Approx(row_sum).epsilon(1e-10));
}

TEST_CASE("build errors") {
  try {
    build_birkhoff(make_grid(GridKind::Uniform, 32));
    FAIL("uniform N=32 should be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditionedBasis);
  }
  try {
    build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, kMaxBirkhoffOrder + 1));
    FAIL("order above the cap should be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidOrder);
  }
  try {
    build_birkhoff(Grid(GridKind::Custom, {0.0, 1.0}, {0.1, 0.5, 0.9}));
    FAIL("grid without endpoints should be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedGrid);
  }
}

TEST_CASE("large-order build keeps the transform residual small") {
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 512));
  CHECK(sys.modal().transform_residual <= 1e-10);
  CHECK(std::abs(sys.weights().sum() - 2.0) <= 1e-12);
}

TEST_CASE("chebyshev series helpers") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd c(9);
  for (auto& v : c) v = U(rng);
  auto direct = [&](const Eigen::VectorXd& a, double x) {
    double s = 0.0;
    for (int k = 0; k < a.size(); ++k) s += a[k] * std::cos(k * std::acos(x));
    return s;
  };
  const Eigen::VectorXd F = chebyshev::antiderivative(c);
  const Eigen::VectorXd d = chebyshev::derivative(c);
  for (double x : {-0.9, -0.3, 0.0, 0.45, 0.99}) {
    CHECK(chebyshev::evaluate(c, x) == doctest::Approx(direct(c, x)).epsilon(1e-13));
    const double ref_int = oracle::integrate([&](double s) { return direct(c, s); }, -1.0, x);
    CHECK(chebyshev::evaluate(F, x) == doctest::Approx(ref_int).epsilon(1e-12));
    const double h = 1e-6;
    CHECK(chebyshev::evaluate(d, x) ==
          doctest::Approx((direct(c, x + h) - direct(c, x - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK(std::abs(chebyshev::evaluate(F, -1.0)) <= 1e-15);
}
