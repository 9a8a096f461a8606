#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gpcorrect/gp.hpp"
#include "gpcorrect/scenario.hpp"

namespace gpc {

/// Field evaluated on a batch of points: |points| x p.
using BatchField = std::function<Matrix(const StateList&)>;

/// Cell midpoints of a uniform resolution^m grid over `domain`.
StateList midpoint_grid(const Box& domain, std::size_t resolution);

/// Midpoint-rule estimate of the integral of |estimate(y) - truth(y)|_2 over `domain`.
double field_error(const BatchField& estimate, const BatchField& truth, const Box& domain,
                   std::size_t resolution);

enum class Method { design, random, agnostic };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct BenchRow {
  std::size_t realization = 0;
  Method method = Method::design;
  std::size_t budget = 0;
  double error = 0.0;
  std::uint64_t seed = 0;  // realization seed (noise and random picks)
  std::vector<std::size_t> seeds;  // candidate indices used
};

struct MethodSummary {
  Method method = Method::design;
  std::size_t budget = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct BenchReport {
  ScenarioKind scenario = ScenarioKind::linear_quadratic;
  std::uint64_t master_seed = 0;
  std::size_t realizations = 0;
  std::vector<std::size_t> budgets;
  std::vector<Method> methods;
  std::vector<std::size_t> design_order;
  std::vector<BenchRow> rows;
  std::vector<MethodSummary> summaries;
  double correction_energy = 0.0;  // integral of |F|
  double full_energy = 0.0;        // integral of |F + G|
  /// Wall-clock seconds per method (not reproducible; kept out of the CSV).
  std::map<std::string, double> timings;

  double mean_error(Method method, std::size_t budget) const;
};

/// Seed of realization r: derive_seed(master, r).
std::uint64_t realization_seed(std::uint64_t master, std::size_t realization);

/// design: designed seeds, GP on the correction.  random: uniformly drawn
/// candidates (nested across budgets), GP on the correction.  agnostic:
/// designed seeds, GP on the full dynamics with the agnostic kernel.
/// Noise for candidate c in realization r comes from stream c of realization_seed(r).
BenchReport run_comparison(const Scenario& scenario, const std::vector<Method>& methods,
                           std::size_t realizations, std::vector<std::size_t> budgets = {});

/// Emulate held-out initial conditions with the fitted correction and
/// compare against the true and G-only trajectories (sup over the grid of
/// the Euclidean error).
struct TrajectoryStudy {
  std::size_t train_count = 0;
  std::vector<double> proxy_errors;
  std::vector<double> gp_errors;
  std::vector<double> rff_errors;
  double gp_improved_fraction = 0.0;
  double rff_improved_fraction = 0.0;
  double rff_gp_endpoint_gap = 0.0;  // max endpoint distance GP-corrected vs RFF-corrected
};

TrajectoryStudy trajectory_study(const Scenario& scenario, std::size_t train_count,
                                 std::size_t test_count, std::uint64_t seed,
                                 std::size_t rff_features = 0);

/// Observations of the learned components at the sampled states of the given
/// candidates' true trajectories (simulation mode).
ObservationSet observe_candidates(const Scenario& scenario, const std::vector<Trajectory>& truth,
                                  const std::vector<std::size_t>& candidates, std::uint64_t seed);

/// dy/dt = G(y) + lift(correction(project(y))).
VectorField corrected_field(const Scenario& scenario, std::function<State(const State&)> correction);

}  // namespace gpc
