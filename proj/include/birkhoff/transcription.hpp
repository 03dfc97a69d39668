#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/nlp.hpp"
#include "birkhoff/ocp.hpp"

namespace birkhoff {

enum class FormTag { A, B, AStar, BStar };

/**
 * @brief One of the four primal discretizations, optionally with weight-scaled variables.
 *
 * a and b anchor the state interpolant at t0 and tf. The starred forms multiply the state
 * and dynamics blocks row-wise by the quadrature weights. `scaled` replaces X, U, V by
 * w o X, w o U, w o V as decision variables and is only meaningful for a and b.
 */
struct PrimalForm {
  FormTag tag = FormTag::A;
  bool scaled = false;

  bool right_anchored() const { return tag == FormTag::B || tag == FormTag::BStar; }
  bool starred() const { return tag == FormTag::AStar || tag == FormTag::BStar; }
  bool operator==(const PrimalForm&) const = default;
};

std::string_view to_string(FormTag tag);
/// Accepts a, b, a_star, b_star (and a*, b*). Throws invalid-form otherwise.
FormTag form_tag_from_string(std::string_view tag);
/// Throws invalid-form for scaled starred forms.
PrimalForm make_form(FormTag tag, bool scaled = false);

/// Index arithmetic for the flat decision vector [X | U | V | x_a | x_b], state-major.
struct NlpLayout {
  int N = 0;
  int n_x = 0;
  int n_u = 0;

  int nodes() const { return N + 1; }
  int X(int state, int node) const { return state * nodes() + node; }
  int U(int control, int node) const { return n_x * nodes() + control * nodes() + node; }
  int V(int state, int node) const { return (n_x + n_u) * nodes() + state * nodes() + node; }
  int x_a(int state) const { return (2 * n_x + n_u) * nodes() + state; }
  int x_b(int state) const { return (2 * n_x + n_u) * nodes() + n_x + state; }
  int dimension() const { return (2 * n_x + n_u) * nodes() + 2 * n_x; }

  // Equality rows: state block, dynamics block, grid equivalency, then endpoint equalities.
  int state_row(int state, int node) const { return state * nodes() + node; }
  int dynamics_row(int state, int node) const { return n_x * nodes() + state * nodes() + node; }
  int equivalency_row(int state) const { return 2 * n_x * nodes() + state; }
  int endpoint_eq_row(int k) const { return 2 * n_x * nodes() + n_x + k; }
};

struct PrimalSolution {
  Eigen::MatrixXd X;  ///< n_x x (N+1)
  Eigen::MatrixXd U;  ///< n_u x (N+1)
  Eigen::MatrixXd V;  ///< n_x x (N+1)
  Eigen::VectorXd x_a;
  Eigen::VectorXd x_b;
  double objective = 0.0;
  double feasibility = 0.0;           ///< max |c_eq|, max(c_in, 0)
  double equivalency_residual = 0.0;  ///< max |x_b - x_a - w^T V|
};

/// Multipliers in the convention of the weighted Lagrangian (state-major matrices).
struct WeightedMultipliers {
  Eigen::MatrixXd Psi_B;  ///< n_x x (N+1)
  Eigen::MatrixXd Psi_V;  ///< n_x x (N+1); the scaled multiplier for scaled forms
  Eigen::VectorXd psi_b;
  Eigen::VectorXd psi_e;  ///< endpoint-constraint order of the problem
};

enum class GuessStrategy { ConstantMidpoint, LinearInterpolation, UserSupplied };
GuessStrategy guess_strategy_from_string(std::string_view tag);

/// Default equality tolerance; just above sqrt(machine epsilon).
inline constexpr double kDefaultFeasibilityTolerance = 2e-8;

/**
 * @brief Transcription of a Mayer problem on one Birkhoff system in one primal form.
 *
 * Residual blocks (form a, unscaled):
 *   state        X - x_a 1 - B_a V
 *   dynamics     V - f(X, U)
 *   equivalency  x_b - x_a - w^T V
 *   endpoint     e(x_a, x_b)
 * The linear part of the Jacobian is assembled once at construction.
 */
class DiscretizedNlp final : public NlpProblem {
 public:
  DiscretizedNlp(OcpDefinition ocp, BirkhoffSystem sys, PrimalForm form,
                 double feasibility_tolerance = kDefaultFeasibilityTolerance);

  int dimension() const override { return layout_.dimension(); }
  int n_eq() const override;
  int n_in() const override { return ocp_.n_in(); }
  NlpEvaluation evaluate(const Eigen::VectorXd& z) const override;
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& mu_eq,
                                     const Eigen::VectorXd& mu_in) const override;

  const OcpDefinition& ocp() const { return ocp_; }
  const BirkhoffSystem& system() const { return sys_; }
  const PrimalForm& form() const { return form_; }
  const NlpLayout& layout() const { return layout_; }
  double feasibility_tolerance() const { return feasibility_tolerance_; }
  /// Structural Jacobian (linear blocks only), unscaled rows and columns.
  const SparseMatrix& constant_jacobian() const { return constant_jacobian_; }

  /// Decision vector -> physical variables (undoes the weight scaling).
  Eigen::VectorXd to_physical(const Eigen::VectorXd& z) const;
  Eigen::VectorXd from_physical(const Eigen::VectorXd& physical) const;

  PrimalSolution primal(const Eigen::VectorXd& z) const;
  Eigen::VectorXd pack(const PrimalSolution& p) const;

  Eigen::VectorXd initial_guess(GuessStrategy strategy,
                                const Eigen::VectorXd& user = Eigen::VectorXd()) const;

  WeightedMultipliers to_weighted_convention(const Eigen::VectorXd& mu_eq, const Eigen::VectorXd& mu_in) const;
  std::pair<Eigen::VectorXd, Eigen::VectorXd> from_weighted_convention(const WeightedMultipliers& m) const;

  /// Endpoint constraint index of equality row k / inequality row k.
  const std::vector<int>& eq_constraint_index() const { return eq_index_; }
  const std::vector<int>& in_constraint_index() const { return in_index_; }

 private:
  OcpDefinition ocp_;
  BirkhoffSystem sys_;
  PrimalForm form_;
  NlpLayout layout_;
  double feasibility_tolerance_;
  SparseMatrix constant_jacobian_;
  Eigen::VectorXd row_weights_;     // w on state/dynamics rows of starred forms, else 1
  Eigen::VectorXd column_scaling_;  // 1/w on X, U, V of scaled forms, else 1
  std::vector<int> eq_index_;
  std::vector<int> in_index_;
};

/// Throws domain-mismatch when the grid domain is not the problem horizon.
DiscretizedNlp transcribe(const OcpDefinition& ocp, const BirkhoffSystem& sys, PrimalForm form,
                          double feasibility_tolerance = kDefaultFeasibilityTolerance);

/// Residuals and sparse Jacobian at z; a thin wrapper over DiscretizedNlp::evaluate.
NlpEvaluation residual_and_jacobian(const DiscretizedNlp& nlp, const Eigen::VectorXd& z);

}  // namespace birkhoff
