#include <doctest.h>

#include <cmath>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/gp.hpp"
#include "gpcorrect/rff.hpp"
#include "helpers.hpp"

using namespace gpc;

namespace {

double max_kernel_error(const FeatureMap& map, std::size_t pairs, std::uint64_t seed, double* rms = nullptr) {
  const auto a = test::random_points(pairs, 2, seed);
  const auto b = test::random_points(pairs, 2, seed + 1);
  double worst = 0, sq = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double e = featurize(map, a[i]).dot(featurize(map, b[i])) - kernel_eval(map.kernel, a[i], b[i]);
    worst = std::max(worst, std::abs(e));
    sq += e * e;
  }
  if (rms) *rms = std::sqrt(sq / static_cast<double>(pairs));
  return worst;
}

ObservationSet smooth_set(std::size_t n, double var, std::uint64_t seed) {
  ObservationSet set;
  set.noise = NoiseModel::isotropic(1, var);
  Rng rng(seed);
  for (const auto& x : test::random_points(n, 2, seed)) {
    State v(1);
    v << std::sin(2 * x(0)) * x(1) + std::sqrt(var) * rng.normal();
    set.samples.push_back({x, v, 0, 0});
  }
  return set;
}

}  // namespace

TEST_CASE("feature sampling is deterministic and rbf-only") {
  const auto k = KernelConfig::rbf(1.0);
  const auto a = sample_features(k, 2, 64, 5), b = sample_features(k, 2, 64, 5), c = sample_features(k, 2, 64, 6);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
  CHECK(a.w != c.w);
  CHECK(feature_checksum(a) == feature_checksum(b));
  CHECK(feature_checksum(a) != feature_checksum(c));
  CHECK_THROWS_AS(sample_features(KernelConfig::polynomial(2), 2, 8, 1), UnsupportedKernelError);
  CHECK(a.b.minCoeff() >= 0.0);
  CHECK(a.b.maxCoeff() < 2 * 3.14159266);
}

TEST_CASE("frequency row norms follow the chi distribution") {
  const double sigma_k2 = 0.5;
  const auto map = sample_features(KernelConfig::rbf(sigma_k2), 2, 4096, 3);
  const double mean = map.w.rowwise().norm().mean();
  // Mean of a chi(2) variable is sqrt(pi/2); scaled by 1/sigma_k.
  const double expect = std::sqrt(std::acos(-1.0) / 2.0) / std::sqrt(sigma_k2);
  CHECK(std::abs(mean - expect) / expect < 0.05);
}

TEST_CASE("kernel approximation") {
  const auto k = KernelConfig::rbf(1.0, 1.0);
  const auto big = sample_features(k, 2, 4096, 2026);
  double rms_big = 0, rms_small = 0;
  CHECK(max_kernel_error(big, 1000, 1, &rms_big) <= 0.05);
  max_kernel_error(sample_features(k, 2, 256, 2026), 1000, 1, &rms_small);
  const double ratio = rms_small / rms_big;
  CHECK(ratio >= 2.5);
  CHECK(ratio <= 6.0);
  for (const auto& y : test::random_points(50, 2, 4)) {
    const double zz = featurize(big, y).squaredNorm();
    CHECK(zz >= 0.0);
    CHECK(zz <= 2.0 + 1e-12);
  }
}

TEST_CASE("averaging independent maps is unbiased") {
  const auto k = KernelConfig::rbf(1.0);
  const auto a = test::random_points(5, 2, 8), b = test::random_points(5, 2, 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0, s2 = 0;
    const int n = 200;
    for (int m = 0; m < n; ++m) {
      const auto map = sample_features(k, 2, 64, 1000 + static_cast<std::uint64_t>(m));
      const double v = featurize(map, a[i]).dot(featurize(map, b[i]));
      s += v;
      s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - kernel_eval(k, a[i], b[i])) <= 3 * se + 1e-12);
  }
}

TEST_CASE("parallel and serial feature matrices agree") {
  const auto map = sample_features(KernelConfig::rbf(0.3), 2, 300, 1);
  const auto pts = test::random_points(40, 2, 2);
  CHECK(feature_matrix(map, pts) == serial::feature_matrix(map, pts));
}

TEST_CASE("ridge: primal equals dual, zero data gives zero model") {
  const auto map = sample_features(KernelConfig::rbf(0.5), 2, 60, 4);
  const auto set = smooth_set(40, 0.01, 3);
  const auto p = fit_ridge(set, map, 0.01, RidgeForm::primal);
  const auto d = fit_ridge(set, map, 0.01, RidgeForm::dual);
  CHECK((p.theta_hat - d.theta_hat).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit_ridge(set, map).ridge == doctest::Approx(0.01));

  auto zero = set;
  for (auto& s : zero.samples) s.value.setZero();
  const auto z = fit_ridge(zero, map);
  CHECK(z.theta_hat.isZero(0.0));
  CHECK(emulate_query(z, State::Zero(2)).isZero(0.0));
  CHECK_THROWS_AS(fit_ridge(set, map, -1.0), ArgumentError);
}

TEST_CASE("ridge converges to the gp posterior mean as D grows") {
  const auto k = KernelConfig::rbf(0.5);
  const auto set = smooth_set(60, 0.01, 7);
  const auto gp = GpPosterior::fit(set, k);
  const auto grid = test::random_points(100, 2, 8);
  const Matrix exact = gp.mean(grid);
  // Averaged over paired seeds; a single draw is too noisy to order.
  auto gap = [&](std::size_t d) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto m = fit_ridge(set, sample_features(k, 2, d, seed));
      double e = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        e = std::max(e, std::abs(emulate_query(m, grid[i])(0) - exact(static_cast<Eigen::Index>(i), 0)));
      }
      total += e;
    }
    return total / 5;
  };
  const double g256 = gap(256), g4096 = gap(4096), g16384 = gap(16384);
  MESSAGE("mean max gap at D = 256, 4096, 16384: ", g256, " ", g4096, " ", g16384);
  CHECK(g4096 < g256);
  CHECK(g16384 < g4096);
  CHECK(g4096 <= 5 * g16384);
}

TEST_CASE("emulated trajectory with zero weights equals the proxy") {
  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  const auto sys = test::linear_system(a);
  RffModel model{sample_features(KernelConfig::rbf(1.0), 2, 16, 1), Matrix::Zero(16, 2), 1e-4};
  State y0(2);
  y0 << 0.5, -0.5;
  const auto grid = TimeGrid::uniform(0.0, 6.0, 11);
  const auto emu = emulate_trajectory(sys, model, y0, grid);
  const auto proxy = integrate_rk4(sys, false, y0, grid);
  CHECK(emu.tag == ModelTag::emulated_model);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(emu.states[i] == proxy.states[i]);
  RffModel wrong{sample_features(KernelConfig::rbf(1.0), 1, 16, 1), Matrix::Zero(16, 1), 1e-4};
  CHECK_THROWS_AS(emulate_trajectory(sys, wrong, y0, grid), ArgumentError);
}
