#include <cmath>
#include <random>

#include "birkhoff/error.hpp"
#include "birkhoff/transcription.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace birkhoff;

namespace {

std::vector<PrimalForm> all_forms() {
  return {make_form(FormTag::A), make_form(FormTag::B), make_form(FormTag::AStar),
          make_form(FormTag::BStar), make_form(FormTag::A, true), make_form(FormTag::B, true)};
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

}  // namespace

TEST_CASE("form tags parse and scaled starred forms are rejected") {
  CHECK(form_tag_from_string("a") == FormTag::A);
  CHECK(form_tag_from_string("b_star") == FormTag::BStar);
  CHECK(form_tag_from_string("a*") == FormTag::AStar);
  CHECK_THROWS_AS(form_tag_from_string("c"), Error);
  try {
    make_form(FormTag::AStar, true);
    FAIL("expected invalid-form");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidForm);
  }
}

TEST_CASE("constraint Jacobians match finite differences in every form") {
  const BenchmarkProblem p = registry("nonlinear-scalar");
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 7, p.mayer.horizon()));
  for (const PrimalForm& form : all_forms()) {
    CAPTURE(to_string(form.tag));
    CAPTURE(form.scaled);
    const DiscretizedNlp nlp = transcribe(p.mayer, sys, form);
    const Eigen::VectorXd z = random_vector(nlp.dimension(), 11);
    const NlpEvaluation ev = nlp.evaluate(z);
    const Eigen::MatrixXd J = Eigen::MatrixXd(ev.J_eq);
    const Eigen::MatrixXd Jfd = oracle::jacobian([&](const Eigen::VectorXd& y) { return nlp.evaluate(y).c_eq; }, z);
    // scaled forms divide by small weights, so compare relative to the entry magnitude
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    CHECK((J - Jfd).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    const Eigen::MatrixXd gfd =
        oracle::jacobian([&](const Eigen::VectorXd& y) { return Eigen::VectorXd::Constant(1, nlp.evaluate(y).objective); }, z);
    CHECK((ev.gradient - gfd.row(0).transpose()).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("Lagrangian Hessian matches finite differences of the Lagrangian gradient") {
  const BenchmarkProblem p = registry("nonlinear-scalar");
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::ChebyshevGaussLobatto, 5, p.mayer.horizon()));
  for (const PrimalForm& form : all_forms()) {
    const DiscretizedNlp nlp = transcribe(p.mayer, sys, form);
    const Eigen::VectorXd z = random_vector(nlp.dimension(), 3);
    const Eigen::VectorXd mu = random_vector(nlp.n_eq(), 5);
    const Eigen::VectorXd mi = Eigen::VectorXd::Zero(nlp.n_in());
    auto grad_L = [&](const Eigen::VectorXd& y) {
      const NlpEvaluation ev = nlp.evaluate(y);
      return Eigen::VectorXd(ev.gradient + Eigen::MatrixXd(ev.J_eq).transpose() * mu);
    };
    const Eigen::MatrixXd H = nlp.lagrangian_hessian(z, mu, mi);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    CHECK((H - oracle::jacobian(grad_L, z)).cwiseAbs().maxCoeff() <= 1e-7 * scale);
  }
}

TEST_CASE("the analytic optimum is feasible in every form") {
  const BenchmarkProblem p = registry("double-integrator-energy");
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 8, p.mayer.horizon()));
  const auto& a = *p.analytic;
  PrimalSolution s;
  const int P = sys.size();
  s.X.resize(3, P);
  s.U.resize(1, P);
  s.V.resize(3, P);
  for (int k = 0; k < P; ++k) {
    const double t = sys.grid().node(k);
    s.X.col(k) = a.state(t);
    s.U.col(k) = a.control(t);
    s.V.col(k) = p.mayer.f(a.state(t), a.control(t));
  }
  s.x_a = a.state(0.0);
  s.x_b = a.state(1.0);
  for (const PrimalForm& form : all_forms()) {
    const DiscretizedNlp nlp = transcribe(p.mayer, sys, form);
    const Eigen::VectorXd z = nlp.pack(s);
    CHECK(nlp.evaluate(z).c_eq.cwiseAbs().maxCoeff() <= 1e-12);
    const PrimalSolution back = nlp.primal(z);
    CHECK((back.X - s.X).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(back.objective == doctest::Approx(6.0).epsilon(1e-12));
  }
}

TEST_CASE("scaling round trip and multiplier relabeling round trip") {
  const BenchmarkProblem p = registry("scalar-lq");
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 6, p.mayer.horizon()));
  for (const PrimalForm& form : all_forms()) {
    const DiscretizedNlp nlp = transcribe(p.mayer, sys, form);
    const Eigen::VectorXd z = random_vector(nlp.dimension(), 9);
    CHECK((nlp.from_physical(nlp.to_physical(z)) - z).cwiseAbs().maxCoeff() <= 1e-14);
    const Eigen::VectorXd mu = random_vector(nlp.n_eq(), 4);
    const Eigen::VectorXd mi = Eigen::VectorXd::Zero(nlp.n_in());
    const auto [mu2, mi2] = nlp.from_weighted_convention(nlp.to_weighted_convention(mu, mi));
    CHECK((mu2 - mu).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("initial guesses") {
  const BenchmarkProblem p = registry("double-integrator-energy");
  const BirkhoffSystem sys = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 4, p.mayer.horizon()));
  const DiscretizedNlp nlp = transcribe(p.mayer, sys, make_form(FormTag::A));
  const PrimalSolution lin = nlp.primal(nlp.initial_guess(GuessStrategy::LinearInterpolation));
  CHECK(lin.x_a[0] == doctest::Approx(0.0));
  CHECK(lin.x_b[0] == doctest::Approx(1.0));
  const Eigen::VectorXd user = Eigen::VectorXd::Constant(nlp.dimension(), 0.25);
  CHECK((nlp.initial_guess(GuessStrategy::UserSupplied, user) - user).norm() == 0.0);
  CHECK_THROWS_AS(nlp.initial_guess(GuessStrategy::UserSupplied, Eigen::VectorXd::Ones(3)), Error);
  CHECK(guess_strategy_from_string("constant-midpoint") == GuessStrategy::ConstantMidpoint);
}

TEST_CASE("transcription preconditions") {
  const BenchmarkProblem p = registry("scalar-lq");
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ShapeError;
  };
  const BirkhoffSystem wrong = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 4, {0.0, 2.0}));
  CHECK(code_of([&] { transcribe(p.mayer, wrong, make_form(FormTag::A)); }) == ErrorCode::DomainMismatch);
  const BirkhoffSystem ok = build_birkhoff(make_grid(GridKind::LegendreGaussLobatto, 4, p.mayer.horizon()));
  CHECK(code_of([&] { transcribe(p.mayer, ok, make_form(FormTag::A), 1e-12); }) == ErrorCode::InvalidConfig);
}
