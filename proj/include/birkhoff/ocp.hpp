#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "birkhoff/grid.hpp"

namespace birkhoff {

using DynamicsFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;
/// Hessian of lambda^T f(x, u) with respect to the stacked (x, u).
using DynamicsHessianFn = std::function<Eigen::MatrixXd(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& lambda)>;
using EndpointFn = std::function<double(const Eigen::VectorXd& x_a, const Eigen::VectorXd& x_b)>;
/// Gradient with respect to the stacked (x_a, x_b), length 2 n_x.
using EndpointGradFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x_a, const Eigen::VectorXd& x_b)>;
using EndpointHessFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& x_a, const Eigen::VectorXd& x_b)>;

/// Inequality rows are feasible when e <= 0.
enum class ConstraintKind { Equality, Inequality };

struct EndpointConstraint {
  std::string label;
  ConstraintKind kind = ConstraintKind::Equality;
  EndpointFn value;
  EndpointGradFn grad;
  EndpointHessFn hess;  ///< optional; finite differences of `grad` when empty
};

/**
 * @brief Mayer-form optimal control problem.
 *
 *   minimize E(x(t0), x(tf))  subject to  x' = f(x, u),  e(x(t0), x(tf)) (= or <=) 0
 *
 * Callbacks must be pure: the library may call them in any order and any number of times.
 * Second-derivative callbacks are optional and fall back to central differences.
 */
struct OcpDefinition {
  std::string name;
  int n_x = 0;
  int n_u = 0;
  double t0 = 0.0;
  double tf = 1.0;

  DynamicsFn f;
  JacobianFn f_x;
  JacobianFn f_u;
  DynamicsHessianFn f_hess;

  EndpointFn E;
  EndpointGradFn E_grad;
  EndpointHessFn E_hess;

  std::vector<EndpointConstraint> constraints;

  /// Endpoint values known from fixed-state constraints; used only for initial guesses.
  std::vector<std::optional<double>> initial_hint;
  std::vector<std::optional<double>> final_hint;

  int n_e() const { return static_cast<int>(constraints.size()); }
  int n_eq() const;
  int n_in() const;
  Domain horizon() const { return {t0, tf}; }
};

/// Blank problem with zero cost, no constraints and sized hint vectors.
OcpDefinition make_ocp(std::string name, int n_x, int n_u, double t0, double tf);

/// Appends the equality x_i(t0) = value.
void fix_initial_state(OcpDefinition& ocp, int i, double value);
/// Appends the equality x_i(tf) = value.
void fix_final_state(OcpDefinition& ocp, int i, double value);

/// Throws invalid-config when a mandatory callback is missing or the horizon is bad.
void check_definition(const OcpDefinition& ocp);

// Derivative helpers honoring the finite-difference fallbacks.
Eigen::MatrixXd dynamics_hessian(const OcpDefinition& ocp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& lambda);
Eigen::MatrixXd cost_hessian(const OcpDefinition& ocp, const Eigen::VectorXd& x_a,
                             const Eigen::VectorXd& x_b);
Eigen::MatrixXd constraint_hessian(const OcpDefinition& ocp, int row, const Eigen::VectorXd& x_a,
                                   const Eigen::VectorXd& x_b);

struct RunningCost {
  std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& u)> L;
  /// Gradient with respect to the stacked (x, u).
  std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)> grad;
  /// Optional Hessian with respect to (x, u).
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)> hess;
};

/**
 * @brief Mayer reduction of a running cost.
 *
 * Appends the state x_n with x_n' = L(x, u), the equality x_n(t0) = 0, and replaces E by
 * E + x_n(tf). Throws incomplete-derivatives if L or its gradient is missing.
 */
OcpDefinition augment_running_cost(const OcpDefinition& ocp, const RunningCost& cost);

struct DerivativeCheck {
  std::string block;
  double max_relative_error = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<DerivativeCheck> checks;
  double tolerance = 1e-5;
  bool pass = true;
};

/// Compares every supplied derivative with central differences at deterministic random points.
ValidationReport validate(const OcpDefinition& ocp, int samples = 3, unsigned seed = 20240611);

/// Known optimum of a registry problem, expressed in the Mayer (augmented) coordinates.
struct AnalyticSolution {
  std::function<Eigen::VectorXd(double t)> state;
  std::function<Eigen::VectorXd(double t)> costate;
  std::function<Eigen::VectorXd(double t)> control;
  double cost = 0.0;
};

struct BenchmarkProblem {
  std::string name;
  OcpDefinition original;            ///< before Mayer reduction
  std::optional<RunningCost> running;
  OcpDefinition mayer;               ///< what transcription consumes
  std::optional<AnalyticSolution> analytic;
};

/// double-integrator-energy, scalar-lq, nonlinear-scalar, zero-dynamics; not-found otherwise.
BenchmarkProblem registry(std::string_view name);
std::vector<std::string> registry_names();

/**
 * @brief Linear-quadratic problem from JSON.
 *
 * Keys: name, horizon [t0, tf], A, B (matrices), optional c (drift), optional Q, R
 * (running cost 1/2 x^T Q x + 1/2 u^T R u), optional S and target (terminal cost
 * 1/2 (x_b - target)^T S (x_b - target)), initial and final (arrays, null for free).
 * Throws invalid-config on malformed input.
 */
BenchmarkProblem load_problem_json(std::string_view text);
BenchmarkProblem load_problem_file(const std::string& path);

}  // namespace birkhoff
