#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "birkhoff/nlp.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

enum class SolverStatus { Converged, MaxIter, LineSearchFailure, Infeasible };
std::string_view to_string(SolverStatus status);

struct SolverOptions {
  int max_iter = 100;
  double tol_stat = 1e-9;
  double tol_feas = 2e-8;
  double tol_comp = 1e-9;
  double regularization_floor = 1e-8;  ///< first diagonal shift when the KKT matrix is singular
  int max_regularizations = 10;        ///< doublings of the shift before giving up
  bool verbose = false;                ///< one line per iteration on stderr
};

struct IterationRecord {
  int iter = 0;
  double merit = 0.0;
  double step = 0.0;
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  double regularization = 0.0;
};

struct KktResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  double max() const;
};

struct NlpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd mu_eq;  ///< raw multipliers of L = F + mu_eq^T c_eq + mu_in^T c_in
  Eigen::VectorXd mu_in;
  std::optional<WeightedMultipliers> multipliers;  ///< filled when solving a DiscretizedNlp
  KktResiduals residuals;
  double kkt_residual = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::MaxIter;
  std::vector<IterationRecord> log;
};

/// Stationarity, feasibility and complementarity infinity norms at (z, mu).
KktResiduals kkt_residuals(const NlpProblem& nlp, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& mu_eq, const Eigen::VectorXd& mu_in);
/// Max of the three residuals.
double kkt_residual(const NlpProblem& nlp, const Eigen::VectorXd& z, const Eigen::VectorXd& mu_eq,
                    const Eigen::VectorXd& mu_in);
/// Same, with multipliers given in the weighted-Lagrangian convention of the transcription.
double kkt_residual(const DiscretizedNlp& nlp, const Eigen::VectorXd& z, const WeightedMultipliers& m);

/**
 * @brief Exact-Hessian SQP.
 *
 * Each iteration solves the Newton-KKT system with a Bunch-Kaufman factorization, runs an
 * active set over the inequality rows, and globalizes with an l1 merit line search
 * (Armijo, halving, one second-order correction).
 */
NlpResult solve(const NlpProblem& nlp, const Eigen::VectorXd& z0, const SolverOptions& options = {});
/// As above, plus relabeling of the multipliers to the weighted-Lagrangian convention.
NlpResult solve(const DiscretizedNlp& nlp, const Eigen::VectorXd& z0, const SolverOptions& options = {});

/// CSV: iter,merit,step,stationarity,feasibility,complementarity,regularization
std::string iteration_log_csv(const std::vector<IterationRecord>& log);

}  // namespace birkhoff
