#pragma once

#include <vector>

#include <Eigen/Dense>

namespace birkhoff {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/**
 * @brief Dense Bunch-Kaufman LDL^T (LAPACK dsytrf/dsytrs) with inertia from the block diagonal.
 *
 * Pivots below n * eps * max|A| count as zero; solve() refuses singular factors.
 */
class SymmetricIndefiniteSolver {
 public:
  /// Factorizes the lower triangle of A. Returns false when LAPACK reports an exact zero pivot.
  bool factorize(const Eigen::MatrixXd& A);

  const Inertia& inertia() const { return inertia_; }
  bool singular() const { return inertia_.zero > 0; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd factor_;  // column-major, lower
  std::vector<int> pivots_;
  Inertia inertia_;
  bool ok_ = false;
};

}  // namespace birkhoff
