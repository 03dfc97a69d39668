#include <cmath>

#include "birkhoff/bench.hpp"
#include "birkhoff/error.hpp"
#include "doctest.h"

using namespace birkhoff;

TEST_CASE("condition numbers and the core convention") {
  Eigen::MatrixXd B(2, 2);
  B << 0.0, 0.0, 1.0, 1.0;  // B_a at N = 1 on [-1, 1]
  CHECK(std::isinf(condition_number(B)));
  // one nonzero singular value: the ratio of the extremes is 1
  CHECK(condition_number(core_rows(B)) == doctest::Approx(1.0));
  CHECK(condition_number(Eigen::Vector3d(1.0, 2.0, 4.0).asDiagonal().toDenseMatrix()) == doctest::Approx(4.0));
  CHECK_THROWS_AS(core_rows(Eigen::MatrixXd::Ones(1, 3)), Error);
}

TEST_CASE("log-log slope of an exact power law") {
  const std::vector<double> x{8, 16, 32, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), Error);
}

TEST_CASE("cond study rows") {
  const auto rows = cond_study(GridKind::LegendreGaussLobatto, {4, 8, 16});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.built);
    CHECK(r.cond_D >= 1.0);
    CHECK(r.cond_B_a >= 1.0);
    CHECK(r.cond_kkt >= 1.0);
  }
  CHECK(rows[2].cond_D > rows[0].cond_D);

  CHECK_THROWS_AS(cond_study(GridKind::LegendreGaussLobatto, {16, 8}), Error);
  const auto capped = cond_study(GridKind::LegendreGaussLobatto, {kMaxBirkhoffOrder + 1});
  CHECK_FALSE(capped[0].built);
  CHECK(capped[0].note.find("skipped") != std::string::npos);
  const auto uniform = cond_study(GridKind::Uniform, {32});
  CHECK(uniform[0].note == "ill-conditioned-basis");
}

TEST_CASE("csv output is deterministic") {
  const auto a = cond_study_csv(cond_study(GridKind::ChebyshevGaussLobatto, {4, 8}));
  const auto b = cond_study_csv(cond_study(GridKind::ChebyshevGaussLobatto, {4, 8}));
  CHECK(a == b);
  CHECK(a.rfind("kind,N,cond_D,cond_B_a,cond_kkt,note\n", 0) == 0);
  CHECK(cond_gnuplot_script("c.csv", "c.png").find("logscale xy") != std::string::npos);
}

TEST_CASE("convergence study") {
  SUBCASE("polynomial optimum is exact from N = 3") {
    const auto rows = convergence_study("double-integrator-energy", make_form(FormTag::A),
                                        GridKind::LegendreGaussLobatto, {3, 6});
    for (const auto& r : rows) {
      CHECK(r.status == "converged");
      CHECK(r.cost_error <= 1e-9);
      CHECK(r.state_error <= 1e-9);
      CHECK(r.costate_error <= 1e-9);
    }
  }
  SUBCASE("nonlinear problem improves with N; uniform grid is worse") {
    const auto lgl = convergence_study("nonlinear-scalar", make_form(FormTag::A), GridKind::LegendreGaussLobatto,
                                       {8, 16, 32});
    CHECK(lgl[1].state_error <= lgl[0].state_error);
    CHECK(lgl[1].cost_error <= lgl[0].cost_error);
    const auto uni = convergence_study("nonlinear-scalar", make_form(FormTag::A), GridKind::Uniform, {32});
    CHECK(uni[0].state_error > lgl[2].state_error);
  }
  SUBCASE("forms without a mapping report NaN costate errors") {
    const auto rows = convergence_study("scalar-lq", make_form(FormTag::B), GridKind::LegendreGaussLobatto, {4});
    CHECK(std::isnan(rows[0].costate_error));
    CHECK(rows[0].state_error <= 1e-10);
  }
}
