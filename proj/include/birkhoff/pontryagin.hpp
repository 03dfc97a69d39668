#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/ocp.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

/**
 * @brief Discrete costates.
 *
 * Lambda holds node costates and Omega the co-virtual variables (node values of the
 * costate derivative), both n_x x (N+1).
 */
struct DualTrajectory {
  Eigen::MatrixXd Lambda;
  Eigen::MatrixXd Omega;
  Eigen::VectorXd lambda_a;
  Eigen::VectorXd lambda_b;
  Eigen::VectorXd nu;
};

/**
 * @brief Pair (theta, phi) selecting one discretization of the Pontryagin system.
 *
 * theta picks the state interpolant anchor and whether the dynamics rows are weighted;
 * phi does the same for the costate interpolant, the adjoint and the control stationarity.
 */
struct DualVariant {
  FormTag theta = FormTag::A;
  FormTag phi = FormTag::BStar;
  bool operator==(const DualVariant&) const = default;
};

std::string to_string(const DualVariant& v);
/// "a,b_star" or "a,b*".
DualVariant dual_variant_from_string(std::string_view text);

/// Named infinity norms of each residual block.
struct BlockResiduals {
  std::vector<std::pair<std::string, double>> blocks;
  double max() const;
  double at(std::string_view name) const;
};

/**
 * @brief Root-finding form of a (theta, phi) discretization.
 *
 * Unknowns, packed state-major: X, U, V, x_a, x_b, Lambda, Omega, lambda_a, lambda_b, nu.
 * Residual rows: state interpolation, costate interpolation, dynamics, adjoint, control
 * stationarity, costate equivalency, state equivalency, endpoint constraints, and the two
 * transversality blocks. The system is square.
 */
class PontryaginSystem {
 public:
  PontryaginSystem(const OcpDefinition& ocp, const BirkhoffSystem& sys, DualVariant variant);

  int unknowns() const;
  int equations() const { return unknowns(); }

  Eigen::VectorXd pack(const PrimalSolution& p, const DualTrajectory& d) const;
  std::pair<PrimalSolution, DualTrajectory> unpack(const Eigen::VectorXd& y) const;

  Eigen::VectorXd residual(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const;

  /// Per-block norms plus complementarity for inequality rows (e reported as max(e, 0)).
  BlockResiduals blocks(const PrimalSolution& p, const DualTrajectory& d) const;

  const DualVariant& variant() const { return variant_; }

 private:
  struct Offsets;
  Offsets offsets() const;

  OcpDefinition ocp_;
  BirkhoffSystem sys_;
  DualVariant variant_;
  int N_;
  int n_;
  int m_;
  int ne_;
};

}  // namespace birkhoff
