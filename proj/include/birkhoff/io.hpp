#pragma once

#include <optional>
#include <string>

#include "birkhoff/birkhoff_system.hpp"
#include "birkhoff/dual_space.hpp"
#include "birkhoff/nlp_solver.hpp"
#include "birkhoff/transcription.hpp"

namespace birkhoff {

// Serializers return text so callers decide where it goes. Numbers use the shortest
// round-trip representation; non-finite values become null in JSON.

/// Grid, weights, B_a, B_b, D and the basis diagnostics.
std::string birkhoff_json(const BirkhoffSystem& sys);

std::string report_json(const PontryaginReport& report);

struct SolutionRecord {
  std::string problem;
  std::string method;  ///< "direct" or "indirect"
  PrimalForm form;
  std::optional<DualVariant> variant;
  GridKind kind = GridKind::LegendreGaussLobatto;
  int N = 0;
  std::string status;
  int iterations = 0;
  double residual = 0.0;  ///< KKT residual (direct) or Newton residual (indirect)
  PrimalSolution primal;
  std::optional<DualTrajectory> dual;
  std::optional<PontryaginReport> report;
  std::string note;
};

std::string solution_json(const SolutionRecord& record);

/// Columns t, x0.., u0.., and lambda0.. when a dual is given.
std::string trajectory_csv(const BirkhoffSystem& sys, const PrimalSolution& primal,
                           const DualTrajectory* dual = nullptr);
/// Columns node, t, lambda0.., omega0...
std::string dual_csv(const BirkhoffSystem& sys, const DualTrajectory& dual);

/// Writes `text` to `path`, creating parent directories; throws invalid-config on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace birkhoff
