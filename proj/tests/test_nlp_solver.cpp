#include <cmath>
#include <numbers>
#include <random>

#include "birkhoff/error.hpp"
#include "birkhoff/nlp_solver.hpp"
#include "birkhoff/sym_indefinite.hpp"
#include "doctest.h"

using namespace birkhoff;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& M) { return M.sparseView(); }

// min (z0 - 1)^2 + (z1 - 2)^2  s.t.  z0 + z1 = 1  and optionally  lo - z0 <= 0.
class ProjectionQp final : public NlpProblem {
 public:
  explicit ProjectionQp(std::optional<double> lower) : lower_(lower) {}
  int dimension() const override { return 2; }
  int n_eq() const override { return 1; }
  int n_in() const override { return lower_ ? 1 : 0; }
  NlpEvaluation evaluate(const Eigen::VectorXd& z) const override {
    NlpEvaluation ev;
    ev.objective = std::pow(z[0] - 1.0, 2) + std::pow(z[1] - 2.0, 2);
    ev.gradient = Eigen::Vector2d(2.0 * (z[0] - 1.0), 2.0 * (z[1] - 2.0));
    ev.c_eq = Eigen::VectorXd::Constant(1, z[0] + z[1] - 1.0);
    ev.J_eq = sparse(Eigen::RowVector2d(1.0, 1.0));
    ev.c_in = lower_ ? Eigen::VectorXd::Constant(1, *lower_ - z[0]) : Eigen::VectorXd();
    ev.J_in = lower_ ? sparse(Eigen::RowVector2d(-1.0, 0.0)) : SparseMatrix(0, 2);
    return ev;
  }
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                     const Eigen::VectorXd&) const override {
    return 2.0 * Eigen::Matrix2d::Identity();
  }

 private:
  std::optional<double> lower_;
};

// min z0 + z1  s.t.  z0^2 + z1^2 = 2.
class CircleLp final : public NlpProblem {
 public:
  int dimension() const override { return 2; }
  int n_eq() const override { return 1; }
  int n_in() const override { return 0; }
  NlpEvaluation evaluate(const Eigen::VectorXd& z) const override {
    NlpEvaluation ev;
    ev.objective = z[0] + z[1];
    ev.gradient = Eigen::Vector2d(1.0, 1.0);
    ev.c_eq = Eigen::VectorXd::Constant(1, z.squaredNorm() - 2.0);
    ev.J_eq = sparse(2.0 * z.transpose());
    ev.J_in = SparseMatrix(0, 2);
    return ev;
  }
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd&, const Eigen::VectorXd& mu,
                                     const Eigen::VectorXd&) const override {
    return 2.0 * mu[0] * Eigen::Matrix2d::Identity();
  }
};

}  // namespace

TEST_CASE("equality-constrained projection") {
  const ProjectionQp qp(std::nullopt);
  const NlpResult r = solve(qp, Eigen::Vector2d(3.0, -4.0));
  REQUIRE(r.status == SolverStatus::Converged);
  CHECK(r.z[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.z[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.mu_eq[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.kkt_residual <= 1e-9);
}

TEST_CASE("active and inactive inequality rows") {
  {
    const ProjectionQp qp(0.5);
    const NlpResult r = solve(qp, Eigen::Vector2d(0.0, 0.0));
    REQUIRE(r.status == SolverStatus::Converged);
    CHECK(r.z[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.mu_eq[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(r.mu_in[0] == doctest::Approx(2.0).epsilon(1e-9));
  }
  {
    const ProjectionQp qp(-5.0);
    const NlpResult r = solve(qp, Eigen::Vector2d(0.0, 0.0));
    REQUIRE(r.status == SolverStatus::Converged);
    CHECK(r.z[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::abs(r.mu_in[0]) <= 1e-10);
  }
}

TEST_CASE("nonconvex equality: minimum on a circle against a brute-force scan") {
  const CircleLp lp;
  const NlpResult r = solve(lp, Eigen::Vector2d(1.0, 0.2));
  REQUIRE(r.status == SolverStatus::Converged);
  double best = 1e300;
  for (int k = 0; k < 200000; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 200000.0;
    best = std::min(best, std::sqrt(2.0) * (std::cos(a) + std::sin(a)));
  }
  CHECK(r.z.sum() == doctest::Approx(best).epsilon(1e-8));
  CHECK(r.mu_eq[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("iteration log is well formed") {
  const CircleLp lp;
  const NlpResult r = solve(lp, Eigen::Vector2d(1.0, 0.2));
  const std::string csv = iteration_log_csv(r.log);
  CHECK(csv.rfind("iter,merit,step,stationarity,feasibility,complementarity,regularization\n", 0) == 0);
  CHECK(static_cast<int>(r.log.size()) >= r.iterations);
}

TEST_CASE("iteration cap reports max-iter") {
  const CircleLp lp;
  SolverOptions opt;
  opt.max_iter = 1;
  const NlpResult r = solve(lp, Eigen::Vector2d(1.0, 0.2), opt);
  CHECK(r.status == SolverStatus::MaxIter);
}

TEST_CASE("registry problems converge in every form on Lobatto grids") {
  for (const auto& name : registry_names()) {
    const BenchmarkProblem p = registry(name);
    for (GridKind kind : {GridKind::LegendreGaussLobatto, GridKind::ChebyshevGaussLobatto}) {
      const BirkhoffSystem sys = build_birkhoff(make_grid(kind, 12, p.mayer.horizon()));
      for (const PrimalForm& form : {make_form(FormTag::A), make_form(FormTag::B), make_form(FormTag::AStar),
                                     make_form(FormTag::BStar), make_form(FormTag::A, true),
                                     make_form(FormTag::B, true)}) {
        CAPTURE(name);
        CAPTURE(to_string(form.tag));
        const DiscretizedNlp nlp = transcribe(p.mayer, sys, form);
        const NlpResult r = solve(nlp, nlp.initial_guess(GuessStrategy::ConstantMidpoint));
        CHECK(r.status == SolverStatus::Converged);
        REQUIRE(r.multipliers);
        CHECK(kkt_residual(nlp, r.z, *r.multipliers) <= 1e-8);
        if (p.analytic) CHECK(nlp.primal(r.z).objective == doctest::Approx(p.analytic->cost).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("inertia of the LDL^T factorization matches the eigenvalue signs") {
  std::mt19937 rng(42);
  std::normal_distribution<double> N01;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = N01(rng);
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
    SymmetricIndefiniteSolver s;
    REQUIRE(s.factorize(A));
    CHECK(s.inertia().positive == (ev.array() > 0.0).count());
    CHECK(s.inertia().negative == (ev.array() < 0.0).count());
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    CHECK((A * s.solve(b) - b).cwiseAbs().maxCoeff() <= 1e-8);
  }
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 3);
  S(0, 0) = 1.0;
  SymmetricIndefiniteSolver s;
  s.factorize(S);
  CHECK(s.singular());
}
