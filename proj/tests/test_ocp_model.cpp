#include <cmath>

#include "birkhoff/error.hpp"
#include "birkhoff/ocp.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace birkhoff;

TEST_CASE("registry lists four problems and rejects unknown names") {
  const auto names = registry_names();
  CHECK(names.size() == 4);
  for (const auto& n : names) CHECK(registry(n).mayer.name == n);
  try {
    registry("brachistochrone");
    FAIL("expected not-found");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
}

TEST_CASE("registry derivatives agree with finite differences") {
  for (const auto& n : registry_names()) {
    CAPTURE(n);
    const ValidationReport r = validate(registry(n).mayer);
    CHECK(r.pass);
    for (const auto& c : r.checks) CHECK(c.max_relative_error <= r.tolerance);
  }
}

TEST_CASE("validate catches a wrong Jacobian") {
  OcpDefinition ocp = registry("nonlinear-scalar").mayer;
  ocp.f_x = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 0) = -2.0 * x[0] * x[0];  // should be -3 x^2
    J(1, 0) = x[0];
    return J;
  };
  const ValidationReport r = validate(ocp);
  CHECK_FALSE(r.pass);
}

TEST_CASE("analytic optima satisfy the necessary conditions") {
  // Independent re-derivation: check dynamics, costate equation and control stationarity
  // of the stored closed forms by finite differences, and the cost by quadrature.
  for (const char* name : {"double-integrator-energy", "scalar-lq", "zero-dynamics"}) {
    CAPTURE(name);
    const BenchmarkProblem p = registry(name);
    REQUIRE(p.analytic);
    const OcpDefinition& ocp = p.mayer;
    const AnalyticSolution& a = *p.analytic;
    const double h = 1e-5;
    for (double t : {0.1, 0.35, 0.5, 0.8}) {
      const Eigen::VectorXd x = a.state(t);
      const Eigen::VectorXd u = a.control(t);
      const Eigen::VectorXd lam = a.costate(t);
      const Eigen::VectorXd xdot = (a.state(t + h) - a.state(t - h)) / (2 * h);
      const Eigen::VectorXd ldot = (a.costate(t + h) - a.costate(t - h)) / (2 * h);
      CHECK((xdot - ocp.f(x, u)).cwiseAbs().maxCoeff() <= 1e-7);
      CHECK((ldot + ocp.f_x(x, u).transpose() * lam).cwiseAbs().maxCoeff() <= 1e-7);
      if (ocp.n_u > 0) CHECK((ocp.f_u(x, u).transpose() * lam).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const Eigen::VectorXd x0 = a.state(ocp.t0);
    const Eigen::VectorXd x1 = a.state(ocp.tf);
    for (const auto& c : ocp.constraints) CHECK(std::abs(c.value(x0, x1)) <= 1e-12);
    CHECK(ocp.E(x0, x1) == doctest::Approx(a.cost).epsilon(1e-12));
    if (p.running) {
      const double J = oracle::integrate(
          [&](double t) { return p.running->L(a.state(t).head(p.original.n_x), a.control(t)); }, ocp.t0, ocp.tf);
      CHECK(J == doctest::Approx(a.cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("running-cost augmentation") {
  const BenchmarkProblem p = registry("double-integrator-energy");
  CHECK(p.mayer.n_x == 3);
  CHECK(p.original.n_x == 2);
  bool found = false;
  for (const auto& c : p.mayer.constraints) found = found || c.label == "cost(t0)";
  CHECK(found);
  Eigen::VectorXd xa = Eigen::VectorXd::Zero(3), xb(3);
  xb << 1.0, 0.0, 4.5;
  CHECK(p.mayer.E(xa, xb) == doctest::Approx(4.5));

  RunningCost incomplete;
  incomplete.L = [](const Eigen::VectorXd&, const Eigen::VectorXd& u) { return u[0]; };
  try {
    augment_running_cost(p.original, incomplete);
    FAIL("expected incomplete-derivatives");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteDerivatives);
  }
}

TEST_CASE("finite-difference Hessian fallback") {
  OcpDefinition ocp = registry("nonlinear-scalar").mayer;
  Eigen::VectorXd x(2), u(1), lam(2);
  x << 0.7, 0.1;
  u << -0.3;
  lam << 1.3, 0.4;
  const Eigen::MatrixXd exact = dynamics_hessian(ocp, x, u, lam);
  ocp.f_hess = nullptr;
  const Eigen::MatrixXd fd = dynamics_hessian(ocp, x, u, lam);
  CHECK((exact - fd).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("check_definition rejects incomplete problems") {
  OcpDefinition ocp = make_ocp("empty", 1, 1, 0.0, 1.0);
  CHECK_THROWS_AS(check_definition(ocp), Error);
  OcpDefinition bad = registry("scalar-lq").mayer;
  bad.tf = bad.t0;
  try {
    check_definition(bad);
    FAIL("expected invalid-domain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDomain);
  }
}

TEST_CASE("linear-quadratic problems from JSON") {
  const char* text = R"({
    "name": "json-lq",
    "horizon": [0, 1],
    "A": [[0]], "B": [[1]],
    "R": [[2]],
    "initial": [0], "final": [1]
  })";
  const BenchmarkProblem p = load_problem_json(text);
  CHECK(p.name == "json-lq");
  CHECK(validate(p.mayer).pass);
  CHECK(p.mayer.n_x == 2);  // state plus cost state

  for (const char* bad : {"{", R"({"horizon": [0, 1]})", R"({"horizon": [1, 0], "A": [[0]], "B": [[1]]})",
                          R"({"horizon": [0, 1], "A": [[0, 1]], "B": [[1]]})"}) {
    CAPTURE(bad);
    try {
      load_problem_json(bad);
      FAIL("expected invalid-config");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
  }
  CHECK_THROWS_AS(load_problem_file("/nonexistent/problem.json"), Error);
}
