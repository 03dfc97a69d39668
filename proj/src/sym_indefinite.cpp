#include "birkhoff/sym_indefinite.hpp"

#include <cmath>
#include <limits>

#include <lapacke.h>

#include "birkhoff/error.hpp"

namespace birkhoff {

bool SymmetricIndefiniteSolver::factorize(const Eigen::MatrixXd& A) {
  const auto n = static_cast<lapack_int>(A.rows());
  factor_ = A;
  pivots_.assign(static_cast<std::size_t>(n), 0);
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n), 0);
  inertia_ = {};
  ok_ = false;
  if (n == 0) {
    ok_ = true;
    return true;
  }
  const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, factor_.data(), n, ipiv.data());
  if (info < 0) throw Error(ErrorCode::ShapeError, "dsytrf rejected argument " + std::to_string(-info));
  for (std::size_t k = 0; k < ipiv.size(); ++k) pivots_[k] = static_cast<int>(ipiv[k]);

  const double threshold = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, A.cwiseAbs().maxCoeff());
  for (lapack_int k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      const double d = factor_(k, k);
      if (std::abs(d) <= threshold) ++inertia_.zero;
      else if (d > 0.0) ++inertia_.positive;
      else ++inertia_.negative;
      k += 1;
    } else {
      // 2x2 block [a b; b c]; eigenvalue signs from determinant and trace.
      const double a = factor_(k, k);
      const double b = factor_(k + 1, k);
      const double c = factor_(k + 1, k + 1);
      const double det = a * c - b * b;
      if (std::abs(det) <= threshold * threshold) {
        ++inertia_.zero;
        if (a + c > 0.0) ++inertia_.positive;
        else ++inertia_.negative;
      } else if (det < 0.0) {
        ++inertia_.positive;
        ++inertia_.negative;
      } else if (a + c > 0.0) {
        inertia_.positive += 2;
      } else {
        inertia_.negative += 2;
      }
      k += 2;
    }
  }
  ok_ = info == 0;
  return ok_;
}

Eigen::VectorXd SymmetricIndefiniteSolver::solve(const Eigen::VectorXd& b) const {
  if (!ok_) throw Error(ErrorCode::NoConvergence, "solve with a singular LDL^T factor");
  const auto n = static_cast<lapack_int>(factor_.rows());
  Eigen::VectorXd x = b;
  if (n == 0) return x;
  std::vector<lapack_int> ipiv(pivots_.begin(), pivots_.end());
  const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, factor_.data(), n,
                                         ipiv.data(), x.data(), n);
  if (info != 0) throw Error(ErrorCode::NoConvergence, "dsytrs failed");
  return x;
}

}  // namespace birkhoff
