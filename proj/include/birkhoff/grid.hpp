#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace birkhoff {

/**
 * @brief Node families.
 *
 * Uniform grids exist for negative testing: polynomial quadrature on them does not
 * converge spectrally. Custom marks grids assembled from user-supplied nodes.
 */
enum class GridKind { ChebyshevGaussLobatto, LegendreGaussLobatto, Uniform, Custom };

std::string_view to_string(GridKind kind);
/// "lgl", "cgl", "uniform", "custom".
std::string_view short_tag(GridKind kind);
/// Accepts the long tags ("legendre-gauss-lobatto") and the short ones ("lgl", "cgl", "uniform").
GridKind grid_kind_from_string(std::string_view tag);

struct Domain {
  double lower = -1.0;
  double upper = 1.0;

  double length() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool operator==(const Domain&) const = default;
};

/// Affine map between the reference interval [-1, 1] and a physical domain.
struct AffineMap {
  double center = 0.0;
  double scale = 1.0;  ///< half the domain length

  double to_reference(double t) const { return (t - center) / scale; }
  double to_physical(double s) const { return center + scale * s; }
};

/**
 * @brief Ordered node set on a finite domain.
 *
 * Invariants: lower <= t_0 < t_1 < ... < t_N <= upper, N >= 1, all finite;
 * Lobatto kinds hit both endpoints exactly. The reference-domain nodes are kept
 * alongside so that basis construction never re-derives them through a lossy map.
 */
class Grid {
 public:
  /// Validates the invariants; throws Error on violation.
  Grid(GridKind kind, Domain domain, std::vector<double> nodes);
  Grid(GridKind kind, Domain domain, std::vector<double> nodes, std::vector<double> reference_nodes);

  GridKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> reference_nodes() const { return reference_nodes_; }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  /// N, the highest node index.
  int order() const { return static_cast<int>(nodes_.size()) - 1; }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool includes_endpoints() const;
  AffineMap affine_map() const { return {domain_.midpoint(), 0.5 * domain_.length()}; }

 private:
  GridKind kind_;
  Domain domain_;
  std::vector<double> nodes_;
  std::vector<double> reference_nodes_;
};

/// Builds N+1 nodes of the requested family on `domain`.
Grid make_grid(GridKind kind, int N, Domain domain = {});

/// The same nodes re-expressed on [-1, 1], and the map that takes them there.
std::pair<Grid, AffineMap> to_reference(const Grid& grid);

/// All N+1 Lobatto nodes on [-1, 1], ascending. LGL interior nodes are the roots of P'_N.
std::vector<double> lgl_reference_nodes(int N);
std::vector<double> cgl_reference_nodes(int N);

}  // namespace birkhoff
