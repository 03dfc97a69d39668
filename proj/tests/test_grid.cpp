#include <cmath>
#include <numbers>

#include "birkhoff/error.hpp"
#include "birkhoff/grid.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

// Derivative of P_N from the identity (1 - x^2) P_N' = N (P_{N-1} - x P_N).
double legendre_derivative(int N, double x) {
  return N * (oracle::legendre(N - 1, x) - x * oracle::legendre(N, x)) / (1.0 - x * x);
}

}  // namespace

TEST_CASE("lgl interior nodes are roots of P_N'") {
  for (int N : {2, 3, 8, 17, 64}) {
    const auto s = lgl_reference_nodes(N);
    REQUIRE(static_cast<int>(s.size()) == N + 1);
    CHECK(s.front() == -1.0);
    CHECK(s.back() == 1.0);
    for (int i = 1; i < N; ++i) {
      CHECK(std::abs(legendre_derivative(N, s[i])) <= 1e-10 * N * N);
      CHECK(s[i] == doctest::Approx(-s[N - i]).epsilon(1e-15));
      CHECK(s[i] > s[i - 1]);
    }
  }
}

TEST_CASE("cgl nodes follow -cos(k pi / N)") {
  const int N = 12;
  const auto s = cgl_reference_nodes(N);
  for (int k = 0; k <= N; ++k) {
    CHECK(s[k] == doctest::Approx(-std::cos(std::numbers::pi * k / N)).epsilon(1e-15));
  }
  CHECK(s[N / 2] == 0.0);
}

TEST_CASE("make_grid maps nodes onto the domain") {
  const Grid g = make_grid(GridKind::LegendreGaussLobatto, 6, {0.0, 2.0});
  CHECK(g.order() == 6);
  CHECK(g.size() == 7);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(6) == 2.0);
  CHECK(g.includes_endpoints());
  const auto ref = g.reference_nodes();
  for (int i = 0; i < g.size(); ++i) CHECK(g.node(i) == doctest::Approx(ref[i] + 1.0).epsilon(1e-15));

  const Grid u = make_grid(GridKind::Uniform, 4, {1.0, 3.0});
  CHECK(u.node(1) == doctest::Approx(1.5));
  CHECK(u.node(2) == doctest::Approx(2.0));
}

TEST_CASE("grid validation errors") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ShapeError;  // sentinel: no throw
  };
  CHECK(code_of([] { make_grid(GridKind::LegendreGaussLobatto, 0); }) == ErrorCode::InvalidOrder);
  CHECK(code_of([] { make_grid(GridKind::LegendreGaussLobatto, 4, {1.0, 1.0}); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { make_grid(GridKind::Custom, 4); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { Grid(GridKind::Custom, {0.0, 1.0}, {0.0, 0.6, 0.5, 1.0}); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { Grid(GridKind::LegendreGaussLobatto, {0.0, 1.0}, {0.1, 0.5, 1.0}); }) ==
        ErrorCode::InvalidDomain);
  CHECK(code_of([] { grid_kind_from_string("gauss"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("grid kind tags round trip") {
  for (GridKind k : {GridKind::ChebyshevGaussLobatto, GridKind::LegendreGaussLobatto, GridKind::Uniform}) {
    CHECK(grid_kind_from_string(to_string(k)) == k);
    CHECK(grid_kind_from_string(short_tag(k)) == k);
  }
}

TEST_CASE("to_reference returns the reference grid and map") {
  const Grid g = make_grid(GridKind::ChebyshevGaussLobatto, 5, {2.0, 6.0});
  const auto [ref, map] = to_reference(g);
  CHECK(ref.domain() == Domain{-1.0, 1.0});
  for (int i = 0; i < g.size(); ++i) {
    CHECK(map.to_physical(ref.node(i)) == doctest::Approx(g.node(i)).epsilon(1e-15));
  }
}
