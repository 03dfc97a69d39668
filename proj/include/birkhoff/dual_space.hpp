#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/nlp_solver.hpp"
#include "birkhoff/ocp.hpp"
#include "birkhoff/pontryagin.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

/// Which covector mapping applies to a primal form.
enum class MappingTheorem { Unscaled, Starred, Scaled };
std::string_view to_string(MappingTheorem theorem);

/// Mapping for a form, or unsupported-mapping for forms without a verified mapping.
MappingTheorem mapping_theorem(const PrimalForm& form);
/// Dual variant whose discrete system the mapped covectors satisfy: a -> (a,b*),
/// a* -> (a*,b*), scaled a -> (a,b).
DualVariant mapped_variant(const PrimalForm& form);

/**
 * @brief Multipliers (weighted-Lagrangian convention) to discrete costates.
 *
 *   Lambda = Psi_V (or Psi_V / w when scaled), Omega = Psi_B, lambda_b = psi_b,
 *   lambda_a = psi_b - Omega w, nu = psi_e.
 */
DualTrajectory map_covectors(const WeightedMultipliers& m, const PrimalForm& form,
                             const Eigen::VectorXd& weights);
/// Throws no-convergence unless the result converged and carries relabeled multipliers.
DualTrajectory map_covectors(const NlpResult& result, const PrimalForm& form,
                             const BirkhoffSystem& sys);

struct PontryaginReport {
  DualVariant variant;
  BlockResiduals residuals;
  double tolerance = 0.0;
  double hamiltonian_spread = 0.0;  ///< max - min of Lambda_k^T f_k; informational
  bool pass = false;
};

/// max(10 * solver_tolerance, induced infinity norm of the integration-by-parts defect).
double default_pontryagin_tolerance(const BirkhoffSystem& sys, double solver_tolerance = 1e-9);

PontryaginReport verify_pontryagin(const OcpDefinition& ocp, const PrimalSolution& primal,
                                   const DualTrajectory& dual, const BirkhoffSystem& sys,
                                   DualVariant variant, std::optional<double> tolerance = {});

struct IndirectInit {
  std::optional<PrimalSolution> primal;
  std::optional<DualTrajectory> dual;
};

struct IndirectOptions {
  double tolerance = 1e-10;
  int max_iter = 50;
};

struct IndirectResult {
  PrimalSolution primal;
  DualTrajectory dual;
  double residual = 0.0;
  int iterations = 0;
};

/**
 * @brief Damped Newton on the square (theta, phi) system.
 *
 * Missing pieces of `init` are built from the endpoint hints: linear states, Lambda equal to
 * dE/dx_b, Omega = 0, and per-node controls from Newton on f_u^T Lambda = 0 started at 0.
 * Throws unsupported-problem for inequality constraints or a singular H_uu, no-convergence
 * otherwise when the residual does not reach the tolerance.
 */
IndirectResult solve_indirect(const OcpDefinition& ocp, const BirkhoffSystem& sys,
                              DualVariant variant, const IndirectInit& init = {},
                              const IndirectOptions& options = {});

}  // namespace birkhoff
