// Wall-clock comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include "gpcorrect/design.hpp"
#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/kernels.hpp"
#include "gpcorrect/rff.hpp"
#include "gpcorrect/rng.hpp"
#include "gpcorrect/scenario.hpp"

using namespace gpc;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const std::string& name, double serial, double parallel, double diff) {
  std::printf("%-22s %12.4f %12.4f %9.2fx %12.3g\n", name.c_str(), serial * 1e3, parallel * 1e3,
              serial / parallel, diff);
}

StateList random_points(std::size_t n, int d, std::uint64_t seed) {
  Rng rng(seed);
  StateList out;
  for (std::size_t i = 0; i < n; ++i) {
    State p(d);
    for (int j = 0; j < d; ++j) p(j) = rng.uniform(-1.0, 1.0);
    out.push_back(p);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %12s %12s %10s %12s\n", "kernel", "serial ms", "parallel ms", "speedup", "max |diff|");

  const auto pts = random_points(1500, 2, 1);
  const auto kernel = KernelConfig::rbf(1.0, 1.0);
  Matrix ks, kp;
  const double ts = best_of(reps, [&] { ks = serial::kernel_matrix(kernel, pts); });
  const double tp = best_of(reps, [&] { kp = kernel_matrix(kernel, pts); });
  row("kernel_matrix 1500", ts, tp, (ks - kp).cwiseAbs().maxCoeff());

  const auto map = sample_features(kernel, 2, 4096, 7);
  const auto q = random_points(2000, 2, 2);
  Matrix fs, fp;
  const double tfs = best_of(reps, [&] { fs = serial::feature_matrix(map, q); });
  const double tfp = best_of(reps, [&] { fp = feature_matrix(map, q); });
  row("feature_matrix 2000x4096", tfs, tfp, (fs - fp).cwiseAbs().maxCoeff());

  const Scenario s = build_scenario(default_linear_quadratic_config());
  const auto grid = s.config.grid();
  std::vector<Trajectory> ps, pp;
  const double tps = best_of(reps, [&] { ps = serial::proxy_states(s.system, s.candidates, grid, s.config.substeps); });
  const double tpp = best_of(reps, [&] { pp = proxy_states(s.system, s.candidates, grid, s.config.substeps); });
  double pdiff = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t t = 0; t < ps[i].states.size(); ++t) {
      pdiff = std::max(pdiff, (ps[i].states[t] - pp[i].states[t]).cwiseAbs().maxCoeff());
    }
  }
  row("proxy_states 169", tps, tpp, pdiff);

  const DesignProblem problem = s.design_problem(9);
  const ProxyCache cache(problem);
  DesignResult gs, gp;
  const double tgs = best_of(reps, [&] { gs = serial::greedy_design(problem, cache); });
  const double tgp = best_of(reps, [&] { gp = greedy_design(problem, cache); });
  row("greedy K=9", tgs, tgp, std::abs(gs.objective - gp.objective));
  std::printf("greedy selections %s\n", gs.selected_indices == gp.selected_indices ? "identical" : "DIFFER");
  return 0;
}
