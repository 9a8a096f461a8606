#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/rng.hpp"
#include "helpers.hpp"

using namespace gpc;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a = Rng::stream(7, 3), b = Rng::stream(7, 3), c = Rng::stream(7, 4);
  for (int i = 0; i < 5; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CHECK(derive_seed(1, 0) != derive_seed(0, 1));
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(11);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_MESSAGE((u >= 0.0 && u < 1.0), u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("time grid validation") {
  CHECK_THROWS_AS(TimeGrid({0.0}), ArgumentError);
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(TimeGrid({-1.0, 1.0}), ArgumentError);
  const auto g = TimeGrid::uniform(0.0, 6.0, 11);
  CHECK(g.size() == 11);
  CHECK(g[1] == doctest::Approx(0.6));
  CHECK(g.back() == 6.0);
}

TEST_CASE("rk4 on dy/dt = y reaches e") {
  Matrix a(1, 1);
  a << 1.0;
  const auto sys = test::linear_system(a, State(), 10.0);
  State y0(1);
  y0 << 1.0;
  const auto tr = integrate_rk4(sys, false, y0, TimeGrid({0.0, 1.0}), 100);
  CHECK(std::abs(tr.states.back()(0) - std::exp(1.0)) < 1e-8);
  CHECK(tr.states.front()(0) == 1.0);
  CHECK(tr.tag == ModelTag::proxy_model);
}

TEST_CASE("rk4 convergence order") {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  State c(2);
  c << 0.05, 0.05;
  const auto sys = test::linear_system(a, c, 10.0);
  State y0(2);
  y0 << 0.8, -0.5;
  const TimeGrid g({0.0, 6.0});
  const State ref = integrate_rk4(sys, true, y0, g, 4096).states.back();
  const double e1 = (integrate_rk4(sys, true, y0, g, 8).states.back() - ref).norm();
  const double e2 = (integrate_rk4(sys, true, y0, g, 16).states.back() - ref).norm();
  CHECK(std::log2(e1 / e2) >= 3.7);
}

TEST_CASE("integration starts from a later first time point") {
  Matrix a(1, 1);
  a << -1.0;
  const auto sys = test::linear_system(a, State(), 10.0);
  State y0(1);
  y0 << 2.0;
  const auto tr = integrate_rk4(sys, false, y0, TimeGrid({0.5, 1.0}), 200);
  CHECK(tr.states[0](0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-9));
  CHECK(tr.states[1](0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("non-finite integration throws with time") {
  SystemSpec sys;
  sys.dim = 1;
  sys.known_term = [](const State& y) -> State { return y.cwiseAbs2() * 10.0; };
  sys.domain = test::square(1, 10.0);
  State y0(1);
  y0 << 1.0;
  try {
    integrate_rk4(sys, false, y0, TimeGrid({0.0, 5.0}), 50);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 5.0);
  }
}

TEST_CASE("matrix exponential") {
  SUBCASE("rotation") {
    const double t = 0.7;
    Matrix a(2, 2);
    a << 0, -t, t, 0;
    const Matrix e = matrix_exponential(a);
    CHECK(e(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-13));
    CHECK(e(1, 0) == doctest::Approx(std::sin(t)).epsilon(1e-13));
  }
  SUBCASE("semigroup") {
    Matrix a(2, 2);
    a << 0.3, 1.2, -2.0, -0.4;
    const Matrix lhs = matrix_exponential(2.5 * a);
    const Matrix rhs = matrix_exponential(1.0 * a) * matrix_exponential(1.5 * a);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero and large norm") {
    CHECK(matrix_exponential(Matrix::Zero(3, 3)).isIdentity(0.0));
    Matrix a(1, 1);
    a << 10.0;
    CHECK(matrix_exponential(a)(0, 0) == doctest::Approx(std::exp(10.0)).epsilon(1e-12));
  }
}

TEST_CASE("linear flow agrees with rk4") {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  const auto sys = test::linear_system(a);
  State y0(2);
  y0 << 1.0, -1.0;
  const auto grid = TimeGrid::uniform(0.0, 6.0, 11);
  const auto tr = integrate_rk4(sys, false, y0, grid, 100);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK((tr.states[i] - linear_flow(a, y0, grid[i])).norm() < 1e-6);
  }
}

TEST_CASE("proxy states: domain checks and serial equality") {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  const auto sys = test::linear_system(a);
  const auto seeds = test::random_points(12, 2, 5);
  const auto grid = TimeGrid::uniform(0.0, 6.0, 11);
  const auto par = proxy_states(sys, seeds, grid);
  const auto ser = serial::proxy_states(sys, seeds, grid);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) {
    CHECK(par[k].tag == ModelTag::proxy_model);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(par[k].states[i] == ser[k].states[i]);
  }
  State out(2);
  out << 2.0, 0.0;
  CHECK_THROWS_AS(proxy_states(sys, {out}, grid), ArgumentError);
  CHECK(flatten_states(par).size() == 12 * 11);
}

TEST_CASE("true states require a correction") {
  Matrix a = Matrix::Identity(2, 2) * -0.1;
  const auto sys = test::linear_system(a);
  CHECK_THROWS_AS(true_states(sys, test::random_points(2, 2, 1), TimeGrid::uniform(0, 1, 3)), ModeError);
}

TEST_CASE("linalg: jitter and eigenvalues") {
  Matrix a(3, 3);
  const double e1 = std::exp(-0.5), e2 = std::exp(-2.0);
  a << 1, e1, e2, e1, 1, e1, e2, e1, 1;
  const double lmin = min_eigenvalue_symmetric(a);
  CHECK(lmin > 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  CHECK(lmin == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));

  Matrix dup = Matrix::Ones(3, 3);
  const auto f = cholesky_with_jitter(dup, 1.0, "test");
  CHECK(f.jitter > 0.0);
  CHECK(f.jitter <= 1e-4);
  CHECK_THROWS_AS(cholesky_with_jitter(-Matrix::Identity(2, 2), 1.0, "test"), IllConditionedError);
  CHECK(log_det_spd(Matrix::Identity(4, 4) * 2.0, 1.0, "t") == doctest::Approx(4 * std::log(2.0)));
}
