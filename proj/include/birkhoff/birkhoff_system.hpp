#pragma once

#include <span>

#include <Eigen/Dense>

#include "birkhoff/grid.hpp"

namespace birkhoff {

/**
 * @brief Chebyshev (reference-domain) representation of the Lagrange basis.
 *
 * Column j of `lagrange` holds the degree-N coefficients of l_j; column j of
 * `antiderivative` holds the degree-(N+1) coefficients of L_j, normalized so that
 * L_j(-1) = 0.
 */
struct ModalBasis {
  Eigen::MatrixXd lagrange;        // (N+1) x (N+1)
  Eigen::MatrixXd antiderivative;  // (N+2) x (N+1)
  double transform_residual = 0.0; // max |T(nodes) * lagrange - I|
};

/**
 * @brief Birkhoff matrices, quadrature weights and the Lagrange differentiation matrix
 * of one endpoint-inclusive grid, already scaled to the physical domain.
 *
 *   B_a(i, j) = B^a_j(t_i) = L_j(t_i) - L_j(t^a)
 *   B_b(i, j) = B^b_j(t_i) = L_j(t_i) - L_j(t^b)
 *   w(j)      = L_j(t^b) - L_j(t^a) = integral of l_j
 *   D(i, j)   = l_j'(t_i)
 *
 * Immutable once built.
 */
class BirkhoffSystem {
 public:
  BirkhoffSystem(Grid grid, ModalBasis modal, Eigen::MatrixXd B_a, Eigen::MatrixXd B_b,
                 Eigen::VectorXd weights, Eigen::MatrixXd D);

  const Grid& grid() const { return grid_; }
  const ModalBasis& modal() const { return modal_; }
  const Eigen::MatrixXd& B_a() const { return B_a_; }
  const Eigen::MatrixXd& B_b() const { return B_b_; }
  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::MatrixXd& D() const { return D_; }
  int order() const { return grid_.order(); }
  int size() const { return grid_.size(); }

  /// Physical-domain value of B^a_j(t) (or B^b_j when `right_anchored`), from the modal series.
  double basis_value(int j, double t, bool right_anchored) const;

 private:
  Grid grid_;
  ModalBasis modal_;
  Eigen::MatrixXd B_a_;
  Eigen::MatrixXd B_b_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd D_;
};

/// Largest N accepted by build_birkhoff.
inline constexpr int kMaxBirkhoffOrder = 4096;

/// Throws unsupported-grid for grids missing an endpoint and ill-conditioned-basis when the
/// modal transform residual exceeds 1e-10.
BirkhoffSystem build_birkhoff(const Grid& grid);

/// Barycentric differentiation matrix with the negative-sum diagonal.
Eigen::MatrixXd build_diff_matrix(const Grid& grid);

/// Barycentric weights, normalized to max magnitude 1 (log-sum products, no overflow).
Eigen::VectorXd barycentric_weights(std::span<const double> nodes);

/// sum_j w(j) f(j); throws shape-error on length mismatch.
double quadrature(std::span<const double> weights, std::span<const double> values);
double quadrature(const Eigen::VectorXd& weights, const Eigen::VectorXd& values);

/// x_a + sum_j V(j) B^a_j(t), evaluated from the degree-(N+1) modal series.
double eval_state_interpolant(double x_a, std::span<const double> V, const BirkhoffSystem& sys,
                              double t);
/// lambda_b + sum_j Omega(j) B^b_j(t).
double eval_costate_interpolant(double lambda_b, std::span<const double> Omega,
                                const BirkhoffSystem& sys, double t);

/// W B_b + B_a^T W; the discrete integration-by-parts defect.
Eigen::MatrixXd integration_by_parts_defect(const BirkhoffSystem& sys);
/// Induced infinity norm (max absolute row sum) of the defect.
double integration_by_parts_norm(const BirkhoffSystem& sys);

}  // namespace birkhoff
