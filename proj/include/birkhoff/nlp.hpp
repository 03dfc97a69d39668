#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace birkhoff {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Objective, constraints and first derivatives at one point.
struct NlpEvaluation {
  double objective = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd c_eq;  ///< c_eq(z) = 0
  Eigen::VectorXd c_in;  ///< c_in(z) <= 0
  SparseMatrix J_eq;
  SparseMatrix J_in;
};

/**
 * @brief Smooth NLP  min F(z)  s.t.  c_eq(z) = 0,  c_in(z) <= 0.
 *
 * Multipliers follow L = F + mu_eq^T c_eq + mu_in^T c_in, so mu_in >= 0 at a KKT point.
 */
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual int dimension() const = 0;
  virtual int n_eq() const = 0;
  virtual int n_in() const = 0;
  virtual NlpEvaluation evaluate(const Eigen::VectorXd& z) const = 0;
  /// Dense Hessian of L at (z, mu_eq, mu_in).
  virtual Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& mu_eq,
                                             const Eigen::VectorXd& mu_in) const = 0;
};

}  // namespace birkhoff
