#include "birkhoff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "birkhoff/error.hpp"

namespace birkhoff {

namespace {

constexpr int kNewtonIterationCap = 100;
constexpr double kNewtonTolerance = 1e-15;

void check_domain(const Domain& d) {
  if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper)) {
    throw Error(ErrorCode::InvalidDomain, "domain must be finite with lower < upper");
  }
}

bool is_lobatto(GridKind kind) {
  return kind == GridKind::ChebyshevGaussLobatto || kind == GridKind::LegendreGaussLobatto;
}

// P_N(x) and P_{N-1}(x) by the three-term recurrence.
std::pair<double, double> legendre_pair(int N, double x) {
  double prev = 1.0;
  double curr = x;
  for (int k = 2; k <= N; ++k) {
    const double next = ((2.0 * k - 1.0) * x * curr - (k - 1.0) * prev) / k;
    prev = curr;
    curr = next;
  }
  return {curr, prev};
}

}  // namespace

std::string_view to_string(GridKind kind) {
  switch (kind) {
    case GridKind::ChebyshevGaussLobatto: return "chebyshev-gauss-lobatto";
    case GridKind::LegendreGaussLobatto: return "legendre-gauss-lobatto";
    case GridKind::Uniform: return "uniform";
    case GridKind::Custom: return "custom";
  }
  return "custom";
}

std::string_view short_tag(GridKind kind) {
  switch (kind) {
    case GridKind::ChebyshevGaussLobatto: return "cgl";
    case GridKind::LegendreGaussLobatto: return "lgl";
    case GridKind::Uniform: return "uniform";
    case GridKind::Custom: return "custom";
  }
  return "custom";
}

GridKind grid_kind_from_string(std::string_view tag) {
  if (tag == "cgl" || tag == "chebyshev-gauss-lobatto") return GridKind::ChebyshevGaussLobatto;
  if (tag == "lgl" || tag == "legendre-gauss-lobatto") return GridKind::LegendreGaussLobatto;
  if (tag == "uniform") return GridKind::Uniform;
  if (tag == "custom") return GridKind::Custom;
  throw Error(ErrorCode::InvalidConfig, "unknown grid kind '" + std::string(tag) + "'");
}

Grid::Grid(GridKind kind, Domain domain, std::vector<double> nodes)
    : Grid(kind, domain, nodes, {}) {}

Grid::Grid(GridKind kind, Domain domain, std::vector<double> nodes,
           std::vector<double> reference_nodes)
    : kind_(kind), domain_(domain), nodes_(std::move(nodes)),
      reference_nodes_(std::move(reference_nodes)) {
  check_domain(domain_);
  if (nodes_.size() < 2) throw Error(ErrorCode::InvalidOrder, "grid needs N >= 1");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw Error(ErrorCode::InvalidDomain, "non-finite node");
    if (i > 0 && !(nodes_[i - 1] < nodes_[i])) {
      throw Error(ErrorCode::InvalidDomain, "nodes must be strictly increasing");
    }
  }
  if (nodes_.front() < domain_.lower || nodes_.back() > domain_.upper) {
    throw Error(ErrorCode::InvalidDomain, "nodes must lie inside the domain");
  }
  if (is_lobatto(kind_) && !includes_endpoints()) {
    throw Error(ErrorCode::InvalidDomain, "Lobatto grids must include both endpoints");
  }
  if (reference_nodes_.empty()) {
    const AffineMap map = affine_map();
    reference_nodes_.reserve(nodes_.size());
    for (double t : nodes_) reference_nodes_.push_back(map.to_reference(t));
    if (nodes_.front() == domain_.lower) reference_nodes_.front() = -1.0;
    if (nodes_.back() == domain_.upper) reference_nodes_.back() = 1.0;
  } else if (reference_nodes_.size() != nodes_.size()) {
    throw Error(ErrorCode::ShapeError, "reference node count differs from node count");
  }
}

bool Grid::includes_endpoints() const {
  return nodes_.front() == domain_.lower && nodes_.back() == domain_.upper;
}

std::vector<double> cgl_reference_nodes(int N) {
  if (N < 1) throw Error(ErrorCode::InvalidOrder, "N must be >= 1");
  // sin form of -cos(k pi / N): exactly antisymmetric, exact zero at the middle.
  std::vector<double> s(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    s[k] = std::sin(std::numbers::pi * (2.0 * k - N) / (2.0 * N));
  }
  s.front() = -1.0;
  s.back() = 1.0;
  return s;
}

std::vector<double> lgl_reference_nodes(int N) {
  if (N < 1) throw Error(ErrorCode::InvalidOrder, "N must be >= 1");
  std::vector<double> s(static_cast<std::size_t>(N) + 1, 0.0);
  s.front() = -1.0;
  s.back() = 1.0;
  // Newton on (1 - x^2) P'_N(x); its derivative is -N(N+1) P_N(x), which reduces the
  // step to (x P_N - P_{N-1}) / ((N+1) P_N). Lower half only, mirrored afterwards.
  for (int i = 1; 2 * i < N; ++i) {
    double x = -std::cos(std::numbers::pi * i / N);
    for (int it = 0; it < kNewtonIterationCap; ++it) {
      const auto [pn, pn1] = legendre_pair(N, x);
      const double dx = (x * pn - pn1) / ((N + 1.0) * pn);
      x -= dx;
      if (std::abs(dx) <= kNewtonTolerance) break;
    }
    s[i] = x;
    s[N - i] = -x;
  }
  return s;
}

Grid make_grid(GridKind kind, int N, Domain domain) {
  if (N < 1) throw Error(ErrorCode::InvalidOrder, "N must be >= 1");
  check_domain(domain);
  std::vector<double> ref;
  switch (kind) {
    case GridKind::ChebyshevGaussLobatto: ref = cgl_reference_nodes(N); break;
    case GridKind::LegendreGaussLobatto: ref = lgl_reference_nodes(N); break;
    case GridKind::Uniform:
      ref.resize(static_cast<std::size_t>(N) + 1);
      for (int k = 0; k <= N; ++k) ref[k] = -1.0 + 2.0 * k / N;
      ref.back() = 1.0;
      break;
    case GridKind::Custom:
      throw Error(ErrorCode::InvalidConfig, "custom grids are built from explicit nodes");
  }
  const AffineMap map{domain.midpoint(), 0.5 * domain.length()};
  std::vector<double> nodes(ref.size());
  std::transform(ref.begin(), ref.end(), nodes.begin(),
                 [&](double s) { return map.to_physical(s); });
  nodes.front() = domain.lower;
  nodes.back() = domain.upper;
  return Grid(kind, domain, std::move(nodes), std::move(ref));
}

std::pair<Grid, AffineMap> to_reference(const Grid& grid) {
  const auto ref = grid.reference_nodes();
  std::vector<double> nodes(ref.begin(), ref.end());
  return {Grid(grid.kind(), Domain{-1.0, 1.0}, nodes, nodes), grid.affine_map()};
}

}  // namespace birkhoff
