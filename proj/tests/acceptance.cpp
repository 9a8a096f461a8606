// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "design_fixtures.hpp"
#include "gpcorrect/bench.hpp"
#include "gpcorrect/design.hpp"
#include "gpcorrect/gp.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/log.hpp"
#include "gpcorrect/observation.hpp"
#include "gpcorrect/rff.hpp"
#include "gpcorrect/rng.hpp"
#include "gpcorrect/scenario.hpp"

using namespace gpc;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %s (%.1fs) %s\n", id, ok ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  for (std::size_t i = 0; i + 1 < n; ++i) std::swap(v[i], v[i + rng.index(n - i)]);
  return v;
}

// AC1
void submodularity() {
  const auto t0 = Clock::now();
  const Scenario s = build_scenario(default_linear_quadratic_config());
  const DesignProblem p = s.design_problem(9);
  const ProxyCache cache(p);
  Rng rng(101);
  int mono_bad = 0, sub_bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto perm = shuffled(cache.candidate_count(), rng);
    const std::size_t t = 1 + rng.index(10);
    const std::size_t k = rng.index(t + 1);
    const std::vector<std::size_t> tset(perm.begin(), perm.begin() + static_cast<long>(t));
    const std::vector<std::size_t> sset(perm.begin(), perm.begin() + static_cast<long>(k));
    const std::size_t x = perm[t];
    auto plus = [&](std::vector<std::size_t> v) {
      v.push_back(x);
      return mutual_information(p, cache, v);
    };
    const double fs = sset.empty() ? 0.0 : mutual_information(p, cache, sset);
    const double ft = mutual_information(p, cache, tset);
    const double gs = plus(sset) - fs, gt = plus(tset) - ft;
    if (gs < -1e-9) ++mono_bad;
    if (gs < gt - 1e-9) ++sub_bad;
    worst = std::min(worst, gs - gt);
  }
  const double sec = seconds_since(t0);
  report("AC1", mono_bad == 0 && sub_bad == 0 && sec < 120,
         fmt("200 triples: monotonicity violations %g, submodularity violations %g, min(gain_S - gain_T) %.3g", mono_bad,
             sub_bad, worst),
         sec);
}

// AC2
void greedy_guarantee() {
  const auto t0 = Clock::now();
  double min_ratio = 1e9, sum = 0;
  int bad = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p = test::random_problem(10, 3, 3, 200 + seed);
    const auto g = greedy_design(p);
    const auto e = exhaustive_design(p);
    if (g.objective < (1.0 - std::exp(-1.0)) * e.objective - 1e-9) ++bad;
    const double r = g.objective / e.objective;
    min_ratio = std::min(min_ratio, r);
    sum += r;
  }
  const double sec = seconds_since(t0);
  report("AC2", bad == 0 && sec < 300,
         fmt("20 instances: below (1-1/e) bound %g; greedy/optimum min %.4f mean %.4f", bad, min_ratio, sum / 20), sec);
}

// AC3
void lazy_equals_greedy() {
  const auto t0 = Clock::now();
  int same = 0, fewer = 0;
  double saved = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto p = test::random_problem(30, 5, 3, 300 + seed);
    const auto g = greedy_design(p);
    const auto l = lazy_greedy_design(p);
    same += g.selected_indices == l.selected_indices;
    fewer += l.evaluations < g.evaluations;
    saved += 1.0 - static_cast<double>(l.evaluations) / static_cast<double>(g.evaluations);
  }
  report("AC3", same == 50 && fewer >= 45,
         fmt("identical sequences %g/50, fewer evaluations %g/50, mean saving %.0f%%", same, fewer, 100 * saved / 50),
         seconds_since(t0));
}

// AC4
void bound_validation() {
  const auto t0 = Clock::now();
  const Scenario s = build_scenario(default_linear_quadratic_config());
  const DesignProblem p = s.design_problem(9);
  const auto design = lazy_greedy_design(p);
  const auto one = validate_bound(p, {design.selected_indices.front()}, 0.01, 50, 4);
  const auto nine = validate_bound(p, design.selected_indices, 0.01, 50, 4);

  Rng rng(404);
  int lb_bad = 0;
  double min_slack = 1e300;
  for (int i = 0; i < 100; ++i) {
    const double var = std::exp(rng.uniform(std::log(1e-3), std::log(1.0)));
    const auto kernel = KernelConfig::rbf(std::exp(rng.uniform(std::log(0.05), std::log(2.0))), rng.uniform(0.1, 2.0));
    const auto q = test::random_problem(8, 3, 2 + rng.index(3), 400 + static_cast<std::uint64_t>(i), var, kernel);
    const ProxyCache cache(q);
    const auto perm = shuffled(8, rng);
    const std::vector<std::size_t> subset(perm.begin(), perm.begin() + 1 + static_cast<long>(rng.index(4)));
    const double slack = mutual_information(q, cache, subset) - mi_lower_bound(q, cache, subset);
    if (slack < -1e-9) ++lb_bad;
    min_slack = std::min(min_slack, slack);
  }
  const bool ok = one.all_within && nine.all_within && lb_bad == 0;
  report("AC4", ok,
         fmt("1 seed: max |dMI|/bound %.3g, vacuous %g/50; 9 seeds: within all, vacuous %g/50; "
             "lower-bound violations %g/100",
             one.max_ratio, one.vacuous_trials, nine.vacuous_trials, lb_bad) +
             fmt(" (min MI - bound %.3g)", min_slack),
         seconds_since(t0));
}

// AC5
void gp_correctness() {
  const auto t0 = Clock::now();
  double mean_err = 0, cov_err = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(500 + seed);
    const std::size_t n = 1 + rng.index(20);
    ObservationSet set;
    set.noise = NoiseModel::isotropic(2, rng.uniform(0.01, 1.0));
    for (const auto& x : test::random_points(n, 2, 600 + seed)) {
      State v(2);
      v << rng.normal(), rng.normal();
      set.samples.push_back({x, v, 0, 0});
    }
    const auto kernel = KernelConfig::rbf(rng.uniform(0.1, 2.0), rng.uniform(0.5, 2.0));
    const auto gp = GpPosterior::fit(set, kernel);
    const auto q = test::random_points(5, 2, 700 + seed, 1.5);
    const Matrix kxx = kernel_matrix(kernel, set.states());
    const Matrix kqx = kernel_matrix(kernel, q, set.states());
    const Matrix inv = (kxx + set.noise.covariance(0, 0) * Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))).inverse();
    mean_err = std::max(mean_err, (gp.mean(q) - kqx * inv * set.values()).cwiseAbs().maxCoeff());
    const Matrix cov = kernel_matrix(kernel, q) - kqx * inv * kqx.transpose();
    for (const auto& c : gp.cov(q)) cov_err = std::max(cov_err, (c - cov).cwiseAbs().maxCoeff());
  }

  ObservationSet exact;
  exact.noise = NoiseModel::isotropic(1, 1e-12);
  Rng rng(800);
  for (const auto& x : test::random_points(15, 2, 801)) exact.samples.push_back({x, State::Constant(1, rng.normal()), 0, 0});
  const auto interp = GpPosterior::fit(exact, KernelConfig::rbf(0.3));
  const double interp_err = (interp.mean(exact.states()) - exact.values()).cwiseAbs().maxCoeff();

  double block_err = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pts = test::random_points(12, 2, 900 + seed);
    const auto k = KernelConfig::rbf(0.5, 1.0);
    const double scalar = MiObjective(k, NoiseModel::isotropic(1, 0.1)).value(pts);
    const double block = MiObjective(k, NoiseModel::isotropic(2, 0.1), true).value(pts);
    block_err = std::max(block_err, std::abs(block - 2.0 * scalar));
  }
  report("AC5", mean_err <= 1e-8 && cov_err <= 1e-8 && interp_err <= 1e-5 && block_err <= 1e-8,
         fmt("oracle mean err %.2e, cov err %.2e; interpolation err %.2e; block vs 2x scalar MI %.2e", mean_err, cov_err,
             interp_err, block_err),
         seconds_since(t0));
}

// AC6
void linear_quadratic_reproduction() {
  const auto t0 = Clock::now();
  const Scenario s = build_scenario(default_linear_quadratic_config());
  const auto study = trajectory_study(s, 40, 20, s.config.seed, s.config.rff_features);
  const auto bench = run_comparison(s, {Method::design, Method::random}, 10, {9});
  const double d = bench.mean_error(Method::design, 9), r = bench.mean_error(Method::random, 9);
  const double sec = seconds_since(t0);
  report("AC6", study.gp_improved_fraction >= 0.9 && d < r && sec < 600,
         fmt("GP-corrected beats G-only on %.0f%% of 20 test seeds (RFF-emulated %.0f%%); "
             "mean field error K=9 design %.4g vs random %.4g",
             100 * study.gp_improved_fraction, 100 * study.rff_improved_fraction, d, r),
         sec);
}

// AC7
void method_ordering() {
  const auto t0 = Clock::now();
  const Scenario s = build_scenario(default_linear_quadratic_config());
  const std::vector<std::size_t> ks = {3, 6, 9, 12};
  const auto rep = run_comparison(s, {Method::design, Method::random, Method::agnostic}, 10, ks);
  const double a = rep.mean_error(Method::agnostic, 9), r = rep.mean_error(Method::random, 9),
               d = rep.mean_error(Method::design, 9);
  bool decreasing = true;
  std::string trend;
  for (Method m : {Method::design, Method::random, Method::agnostic}) {
    trend += " " + to_string(m) + ":";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double e = rep.mean_error(m, ks[i]);
      trend += fmt(" %.4g", e);
      if (i > 0 && e >= rep.mean_error(m, ks[i - 1])) {
        decreasing = false;
        trend += "(!)";
      }
    }
  }
  report("AC7", a >= r && r >= d && decreasing,
         fmt("K=9 agnostic %.4g >= random %.4g >= design %.4g;", a, r, d) + " errors over K=3,6,9,12" + trend,
         seconds_since(t0));
}

// AC8
void rff_fidelity() {
  const auto t0 = Clock::now();
  const auto unit = KernelConfig::rbf(1.0, 1.0);
  const auto map = sample_features(unit, 2, 4096, 2026);
  const auto a = test::random_points(1000, 2, 81), b = test::random_points(1000, 2, 82);
  double kerr = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    kerr = std::max(kerr, std::abs(featurize(map, a[i]).dot(featurize(map, b[i])) - kernel_eval(unit, a[i], b[i])));
  }

  // Linear-quadratic fit on 40 uniformly drawn seeds.
  const Scenario s = build_scenario(default_linear_quadratic_config());
  Rng rng = Rng::stream(s.config.seed, 83);
  StateList seeds;
  for (int i = 0; i < 40; ++i) {
    State y(2);
    y << rng.uniform(-1, 1), rng.uniform(-1, 1);
    seeds.push_back(y);
  }
  const auto truth = true_states(s.system, seeds, s.config.grid(), s.config.substeps);
  std::vector<std::size_t> ids(40);
  std::iota(ids.begin(), ids.end(), 0);
  const auto obs = sample_corrections(s.system, truth, s.system_noise(s.config.seed), ids);
  const auto gp = GpPosterior::fit(obs, s.config.kernel);
  const auto model = fit_ridge(obs, sample_features(s.config.kernel, 2, 4096, derive_seed(s.config.seed, 84)));
  double gap = 0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      State y(2);
      y << -1 + (i + 0.5) / 25.0, -1 + (j + 0.5) / 25.0;
      gap = std::max(gap, (emulate_query(model, y) - gp.mean(y)).cwiseAbs().maxCoeff());
    }
  }
  const double tol = 5e-3 * std::sqrt(s.config.kernel.signal_variance);

  // Query time: median of batched timings, D vs 2D.
  auto median_query = [&](std::size_t d) {
    RffModel m{sample_features(unit, 2, d, 85), Matrix::Ones(static_cast<Eigen::Index>(d), 2), 1e-4};
    const auto qs = test::random_points(100, 2, 86);
    std::vector<double> times;
    double sink = 0;
    for (int batch = 0; batch < 100; ++batch) {
      const auto q0 = Clock::now();
      for (const auto& q : qs) sink += emulate_query(m, q)(0);
      times.push_back(seconds_since(q0));
    }
    std::nth_element(times.begin(), times.begin() + 50, times.end());
    if (sink == 12345.678) std::printf(" ");
    return times[50];
  };
  median_query(4096);  // warm-up
  const double ratio = median_query(8192) / median_query(4096);

  report("AC8", kerr <= 0.05 && gap <= tol && ratio >= 1.6 && ratio <= 2.5,
         fmt("kernel error %.4f (<= 0.05); RFF vs GP mean %.3g vs tolerance %.3g; query time ratio 8192/4096 %.2f", kerr,
             gap, tol, ratio),
         seconds_since(t0));
}

// AC9
void gravity() {
  const auto t0 = Clock::now();
  const Scenario s = build_scenario(default_gravity_config());
  const auto rep = run_comparison(s, {Method::design, Method::random}, 10, {7});
  const double d = rep.mean_error(Method::design, 7), r = rep.mean_error(Method::random, 7);
  const bool ok = s.candidates.size() == 300 && s.config.samples == 20 && d <= r && d < rep.correction_energy &&
                  r < rep.correction_energy;
  report("AC9", ok,
         fmt("K=7, 300 candidates, T=20, 10 realizations: design %.4g <= random %.4g < reference %.4g", d, r,
             rep.correction_energy),
         seconds_since(t0));
}

// AC10
void numerics() {
  const auto t0 = Clock::now();
  const auto [sys, cfg] = scenario_linear_quadratic();
  State y0(2);
  y0 << 0.9, -0.6;
  const TimeGrid span({0.0, 6.0});
  const State ref = integrate_rk4(sys, true, y0, span, 8192).states.back();
  const double e1 = (integrate_rk4(sys, true, y0, span, 4).states.back() - ref).norm();
  const double e2 = (integrate_rk4(sys, true, y0, span, 8).states.back() - ref).norm();
  const double order = std::log2(e1 / e2);

  Matrix a(2, 2);
  a << 0.02, 0.1, -0.1, -0.06;
  const auto grid = cfg.grid();
  double expm_err = 0;
  for (const auto& seed : build_scenario(cfg).candidates) {
    const auto tr = integrate_rk4(sys, false, seed, grid, cfg.substeps);
    for (std::size_t i = 0; i < grid.size(); ++i) expm_err = std::max(expm_err, (tr.states[i] - linear_flow(a, seed, grid[i])).norm());
  }

  auto fd_err = [&](std::size_t n) {
    const auto g = TimeGrid::uniform(0.0, 6.0, n);
    const auto tr = integrate_rk4(sys, true, y0, g, 50);
    const auto d = estimate_derivatives(tr);
    double e = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const State exact = sys.known_term(tr.states[i]) + (*sys.true_correction)(tr.states[i]);
      e = std::max(e, (d[i] - exact).norm());
    }
    return e;
  };
  const double fd_order = std::log2(fd_err(21) / fd_err(41));
  report("AC10", order >= 3.7 && expm_err <= 1e-6 && fd_order >= 1.8,
         fmt("RK4 order %.2f; expm vs RK4 max %.2e; finite-difference order %.2f", order, expm_err, fd_order),
         seconds_since(t0));
}

}  // namespace

int main() {
  log::set_verbosity(0);
  const std::vector<std::function<void()>> checks = {submodularity,   greedy_guarantee, lazy_equals_greedy,
                                                     bound_validation, gp_correctness, linear_quadratic_reproduction,
                                                     method_ordering, rff_fidelity,    gravity,
                                                     numerics};
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      checks[i]();
    } catch (const std::exception& e) {
      report(("AC" + std::to_string(i + 1)).c_str(), false, std::string("exception: ") + e.what(), 0.0);
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, checks.size());
  return failures == 0 ? 0 : 1;
}
