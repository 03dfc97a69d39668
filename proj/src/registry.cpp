#include <cmath>

#include "birkhoff/error.hpp"
#include "birkhoff/ocp.hpp"

namespace birkhoff {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

BenchmarkProblem finish(std::string name, OcpDefinition original, RunningCost running) {
  BenchmarkProblem p;
  p.name = std::move(name);
  p.mayer = augment_running_cost(original, running);
  p.mayer.name = p.name;
  p.original = std::move(original);
  p.running = std::move(running);
  return p;
}

// x1' = x2, x2' = u, L = u^2/2, x(0) = (0, 0), x(1) = (1, 0).
BenchmarkProblem double_integrator_energy() {
  OcpDefinition ocp = make_ocp("double-integrator-energy", 2, 1, 0.0, 1.0);
  ocp.f = [](const Vec& x, const Vec& u) { return vec({x[1], u[0]}); };
  ocp.f_x = [](const Vec&, const Vec&) {
    Mat J = Mat::Zero(2, 2);
    J(0, 1) = 1.0;
    return J;
  };
  ocp.f_u = [](const Vec&, const Vec&) {
    Mat J = Mat::Zero(2, 1);
    J(1, 0) = 1.0;
    return J;
  };
  ocp.f_hess = [](const Vec&, const Vec&, const Vec&) { return Mat::Zero(3, 3).eval(); };
  fix_initial_state(ocp, 0, 0.0);
  fix_initial_state(ocp, 1, 0.0);
  fix_final_state(ocp, 0, 1.0);
  fix_final_state(ocp, 1, 0.0);

  RunningCost L;
  L.L = [](const Vec&, const Vec& u) { return 0.5 * u[0] * u[0]; };
  L.grad = [](const Vec&, const Vec& u) { return vec({0.0, 0.0, u[0]}); };
  L.hess = [](const Vec&, const Vec&) {
    Mat H = Mat::Zero(3, 3);
    H(2, 2) = 1.0;
    return H;
  };

  BenchmarkProblem p = finish("double-integrator-energy", std::move(ocp), std::move(L));
  // u = -lambda_2 from H_u = 0; lambda_2' = -lambda_1; boundary values fix the cubic.
  AnalyticSolution a;
  a.state = [](double t) {
    // third component: integral of (6 - 12 s)^2 / 2 over [0, t]
    return vec({3.0 * t * t - 2.0 * t * t * t, 6.0 * t - 6.0 * t * t,
                18.0 * t - 36.0 * t * t + 24.0 * t * t * t});
  };
  a.costate = [](double t) { return vec({-12.0, 12.0 * t - 6.0, 1.0}); };
  a.control = [](double t) { return vec({6.0 - 12.0 * t}); };
  a.cost = 6.0;
  p.analytic = std::move(a);
  return p;
}

// x' = u, L = u^2, x(0) = 0, x(1) = 1.
BenchmarkProblem scalar_lq() {
  OcpDefinition ocp = make_ocp("scalar-lq", 1, 1, 0.0, 1.0);
  ocp.f = [](const Vec&, const Vec& u) { return vec({u[0]}); };
  ocp.f_x = [](const Vec&, const Vec&) { return Mat::Zero(1, 1).eval(); };
  ocp.f_u = [](const Vec&, const Vec&) { return Mat::Ones(1, 1).eval(); };
  ocp.f_hess = [](const Vec&, const Vec&, const Vec&) { return Mat::Zero(2, 2).eval(); };
  fix_initial_state(ocp, 0, 0.0);
  fix_final_state(ocp, 0, 1.0);

  RunningCost L;
  L.L = [](const Vec&, const Vec& u) { return u[0] * u[0]; };
  L.grad = [](const Vec&, const Vec& u) { return vec({0.0, 2.0 * u[0]}); };
  L.hess = [](const Vec&, const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(1, 1) = 2.0;
    return H;
  };

  BenchmarkProblem p = finish("scalar-lq", std::move(ocp), std::move(L));
  AnalyticSolution a;
  a.state = [](double t) { return vec({t, t}); };
  a.costate = [](double) { return vec({-2.0, 1.0}); };
  a.control = [](double) { return vec({1.0}); };
  a.cost = 1.0;
  p.analytic = std::move(a);
  return p;
}

// x' = -x^3 + u, L = (u^2 + x^2)/2, x(0) = 1, x(1) free.
BenchmarkProblem nonlinear_scalar() {
  OcpDefinition ocp = make_ocp("nonlinear-scalar", 1, 1, 0.0, 1.0);
  ocp.f = [](const Vec& x, const Vec& u) { return vec({-x[0] * x[0] * x[0] + u[0]}); };
  ocp.f_x = [](const Vec& x, const Vec&) { return Mat::Constant(1, 1, -3.0 * x[0] * x[0]).eval(); };
  ocp.f_u = [](const Vec&, const Vec&) { return Mat::Ones(1, 1).eval(); };
  ocp.f_hess = [](const Vec& x, const Vec&, const Vec& lambda) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = -6.0 * x[0] * lambda[0];
    return H;
  };
  fix_initial_state(ocp, 0, 1.0);

  RunningCost L;
  L.L = [](const Vec& x, const Vec& u) { return 0.5 * (u[0] * u[0] + x[0] * x[0]); };
  L.grad = [](const Vec& x, const Vec& u) { return vec({x[0], u[0]}); };
  L.hess = [](const Vec&, const Vec&) { return Mat::Identity(2, 2).eval(); };
  return finish("nonlinear-scalar", std::move(ocp), std::move(L));
}

// x' = 0, E = x_b^2, x(0) = 1; no control and no running cost.
BenchmarkProblem zero_dynamics() {
  OcpDefinition ocp = make_ocp("zero-dynamics", 1, 0, 0.0, 1.0);
  ocp.f = [](const Vec&, const Vec&) { return Vec::Zero(1).eval(); };
  ocp.f_x = [](const Vec&, const Vec&) { return Mat::Zero(1, 1).eval(); };
  ocp.f_u = [](const Vec&, const Vec&) { return Mat::Zero(1, 0).eval(); };
  ocp.f_hess = [](const Vec&, const Vec&, const Vec&) { return Mat::Zero(1, 1).eval(); };
  ocp.E = [](const Vec&, const Vec& xb) { return xb[0] * xb[0]; };
  ocp.E_grad = [](const Vec&, const Vec& xb) { return vec({0.0, 2.0 * xb[0]}); };
  ocp.E_hess = [](const Vec&, const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(1, 1) = 2.0;
    return H;
  };
  fix_initial_state(ocp, 0, 1.0);

  BenchmarkProblem p;
  p.name = "zero-dynamics";
  p.original = ocp;
  p.mayer = std::move(ocp);
  AnalyticSolution a;
  a.state = [](double) { return vec({1.0}); };
  a.costate = [](double) { return vec({2.0}); };
  a.control = [](double) { return Vec(0); };
  a.cost = 1.0;
  p.analytic = std::move(a);
  return p;
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"double-integrator-energy", "scalar-lq", "nonlinear-scalar", "zero-dynamics"};
}

BenchmarkProblem registry(std::string_view name) {
  if (name == "double-integrator-energy") return double_integrator_energy();
  if (name == "scalar-lq") return scalar_lq();
  if (name == "nonlinear-scalar") return nonlinear_scalar();
  if (name == "zero-dynamics") return zero_dynamics();
  throw Error(ErrorCode::NotFound, "no registry problem named '" + std::string(name) + "'");
}

}  // namespace birkhoff
