#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/observation.hpp"
#include "helpers.hpp"

using namespace gpc;

namespace {
SystemSpec quad_system() {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  State c(2);
  c << 0.01, 0.01;
  return test::linear_system(a, c);
}
}  // namespace

TEST_CASE("noise model validation") {
  CHECK_NOTHROW(NoiseModel::isotropic(2, 1e-4).validate());
  NoiseModel bad;
  bad.covariance = Matrix::Identity(2, 2);
  bad.covariance(0, 1) = 0.5;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad.covariance = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  const auto iso = NoiseModel::isotropic(3, 0.5);
  CHECK(iso.is_isotropic());
  CHECK(iso.is_diagonal());
  CHECK(iso.min_singular_value() == doctest::Approx(0.5));
}

TEST_CASE("sampled corrections: shape, tags and noise statistics") {
  const auto sys = quad_system();
  const auto grid = TimeGrid::uniform(0.0, 6.0, 11);
  StateList seeds(200, State::Zero(2));  // F vanishes along the zero trajectory
  const auto truth = true_states(sys, seeds, grid);
  Matrix cov(2, 2);
  cov << 2e-4, 5e-5, 5e-5, 1e-4;
  NoiseModel noise{cov, 42};
  const auto obs = sample_corrections(sys, truth, noise);
  CHECK(obs.size() == 200 * 11);
  CHECK(obs.output_dim() == 2);
  Matrix v = obs.values();
  const Matrix emp = (v.transpose() * v) / static_cast<double>(v.rows());
  CHECK((emp - cov).cwiseAbs().maxCoeff() < 0.05 * cov.maxCoeff());
  CHECK(obs.samples[13].source_experiment == 1);
  CHECK(obs.samples[13].source_time_index == 2);

  const auto again = sample_corrections(sys, truth, noise);
  CHECK(again.values() == v);

  // Stream keyed by experiment id, not by position.
  std::vector<Trajectory> one = {truth[5]};
  const auto solo = sample_corrections(sys, one, noise, {5});
  CHECK(solo.values() == v.block(5 * 11, 0, 11, 2));
}

TEST_CASE("zero-noise limit returns F") {
  const auto sys = quad_system();
  const auto truth = true_states(sys, test::random_points(3, 2, 4), TimeGrid::uniform(0.0, 6.0, 11));
  const auto obs = sample_corrections(sys, truth, NoiseModel{Matrix::Identity(2, 2) * 1e-30, 1});
  for (const auto& s : obs.samples) CHECK((s.value - (*sys.true_correction)(s.state)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampled corrections need truth") {
  const auto sys = quad_system();
  const auto grid = TimeGrid::uniform(0.0, 1.0, 3);
  const auto proxy = proxy_states(sys, test::random_points(2, 2, 3), grid);
  CHECK_THROWS_AS(sample_corrections(sys, proxy, NoiseModel::isotropic(2, 1e-4)), ArgumentError);
  const auto no_f = sys.without_correction();
  const auto truth = true_states(sys, test::random_points(2, 2, 3), grid);
  CHECK_THROWS_AS(sample_corrections(no_f, truth, NoiseModel::isotropic(2, 1e-4)), ModeError);
}

TEST_CASE("finite differences: exact on quadratics, second order otherwise") {
  SUBCASE("quadratic in time on a non-uniform grid") {
    Trajectory tr{State::Zero(1), TimeGrid({0.0, 0.3, 1.0, 1.2, 2.0}), {}, ModelTag::true_model};
    for (double t : tr.grid.points()) tr.states.push_back(State::Constant(1, 3 * t * t - t + 2));
    const auto d = estimate_derivatives(tr);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i](0) == doctest::Approx(6 * tr.grid[i] - 1).epsilon(1e-11));
  }
  SUBCASE("O(h^2) convergence") {
    auto err = [](std::size_t n) {
      const auto g = TimeGrid::uniform(0.0, 1.0, n);
      Trajectory tr{State::Zero(1), g, {}, ModelTag::true_model};
      for (double t : g.points()) tr.states.push_back(State::Constant(1, std::sin(3 * t)));
      const auto d = estimate_derivatives(tr);
      double e = 0;
      for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i](0) - 3 * std::cos(3 * g[i])));
      return e;
    };
    CHECK(std::log2(err(21) / err(41)) > 1.8);
  }
  SUBCASE("too few points") {
    Trajectory tr{State::Zero(1), TimeGrid({0.0, 1.0}), {State::Zero(1), State::Zero(1)}, ModelTag::true_model};
    CHECK_THROWS_AS(estimate_derivatives(tr), ArgumentError);
  }
}

TEST_CASE("corrections from derivatives recover F on a fine grid") {
  const auto sys = quad_system();
  State y0(2);
  y0 << 0.9, -0.7;
  const auto tr = integrate_rk4(sys, true, y0, TimeGrid::uniform(0.0, 2.0, 401), 10);
  const auto obs = corrections_from_derivatives(sys, tr, estimate_derivatives(tr), NoiseModel::isotropic(2, 1e-4));
  double e = 0;
  for (const auto& s : obs.samples) e = std::max(e, (s.value - (*sys.true_correction)(s.state)).norm());
  CHECK(e < 1e-5);
}

TEST_CASE("projection and csv") {
  ObservationSet set;
  set.noise = NoiseModel::isotropic(3, 1e-2, 9);
  CorrectionSample s;
  s.state = State::LinSpaced(3, 1, 3);
  s.value = State::LinSpaced(3, 4, 6);
  s.source_experiment = 2;
  s.source_time_index = 1;
  set.samples.push_back(s);
  const auto p = project(set, {0, 2}, {1});
  CHECK(p.input_dim() == 2);
  CHECK(p.output_dim() == 1);
  CHECK(p.samples[0].state(1) == 3.0);
  CHECK(p.samples[0].value(0) == 5.0);
  CHECK(p.noise.dim() == 1);
  std::ostringstream os;
  write_csv(os, set);
  CHECK(os.str().rfind("k,i,y_1,y_2,y_3,f_1,f_2,f_3\n2,1,", 0) == 0);
}
