#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "birkhoff/grid.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

/**
 * @brief Conditioning of one grid size.
 *
 * Square matrices with a structurally deficient first row (B_a has a zero first row, D
 * annihilates constants) are measured on their core: rows 1..N, cond = sigma_max / sigma_min
 * of the resulting N x (N+1) matrix, which has full row rank. The KKT matrix is the
 * Newton-KKT matrix of the scalar-lq transcription at its optimum.
 */
struct CondStudyRow {
  int N = 0;
  GridKind kind = GridKind::LegendreGaussLobatto;
  double cond_D = 0.0;
  double cond_B_a = 0.0;
  double cond_kkt = 0.0;       ///< NaN when skipped (see note)
  double build_seconds = 0.0;  ///< wall time of build_birkhoff; not written to CSV
  bool built = false;
  std::string note;
};

/// sigma_max / sigma_min of a full-row-rank (or square) matrix; infinity when rank deficient.
double condition_number(const Eigen::MatrixXd& A);
/// Rows 1..N of an (N+1) x (N+1) matrix.
Eigen::MatrixXd core_rows(const Eigen::MatrixXd& M);

struct CondStudyOptions {
  int kkt_max_order = 128;  ///< KKT conditioning skipped above this N
};

/// One row per N in ascending order; N above the build cap or failing builds give notes.
std::vector<CondStudyRow> cond_study(GridKind kind, const std::vector<int>& N_list,
                                     const CondStudyOptions& options = {});

/// Least-squares slope of log(y) against log(x) over the finite, positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRow {
  int N = 0;
  double cost_error = 0.0;
  double state_error = 0.0;
  double costate_error = 0.0;  ///< NaN when the form has no verified covector mapping
  double cmt_residual = 0.0;   ///< max Pontryagin block residual of the mapped covectors
  std::string status;          ///< solver status, or the error tag of a failed build
  int iterations = 0;
};

/**
 * @brief Errors of the direct solve against a reference.
 *
 * The reference is the analytic optimum when the problem has one, else an indirect solve on
 * LGL at max(64, largest N) with variant (a, b*). Failures are recorded per row with
 * infinite errors.
 */
std::vector<ConvergenceRow> convergence_study(const std::string& problem, PrimalForm form,
                                              GridKind kind, const std::vector<int>& N_list);

/// Header plus one row per study row; columns kind,N,cond_D,cond_B_a,cond_kkt,note.
std::string cond_study_csv(const std::vector<CondStudyRow>& rows);
/// Columns problem,form,kind,N,cost_error,state_error,costate_error,cmt_residual,status,iterations.
std::string convergence_csv(const std::string& problem, PrimalForm form, GridKind kind,
                            const std::vector<ConvergenceRow>& rows);
/// Log-log plot script for a cond-study CSV written next to it.
std::string cond_gnuplot_script(const std::string& csv_name, const std::string& png_name);
/// Semilog plot script for a convergence CSV.
std::string convergence_gnuplot_script(const std::string& csv_name, const std::string& png_name);

}  // namespace birkhoff
