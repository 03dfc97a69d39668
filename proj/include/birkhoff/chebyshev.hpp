#pragma once

#include <span>

#include <Eigen/Dense>

namespace birkhoff::chebyshev {

/// Rows are T_0..T_degree evaluated at each x (x in [-1, 1]).
Eigen::MatrixXd vandermonde(std::span<const double> x, int degree);

/// Clenshaw evaluation of sum_k c_k T_k(x).
double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double x);

/**
 * @brief Antiderivative coefficients, one degree higher, normalized so F(-1) = 0.
 *
 * b_k = (c_{k-1} a_{k-1} - a_{k+1}) / (2k), c_0 = 2, c_k = 1 otherwise.
 */
Eigen::VectorXd antiderivative(const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Derivative coefficients, one degree lower (a length-1 series maps to {0}).
Eigen::VectorXd derivative(const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/**
 * @brief Type-I DCT taking values at the CGL points to Chebyshev coefficients.
 *
 * Column m of the returned matrix holds the coefficients of the degree-N interpolant of
 * the m-th unit vector, with nodes ordered ascending (-cos(m pi / N)).
 */
Eigen::MatrixXd cgl_values_to_coefficients(int N);

}  // namespace birkhoff::chebyshev
