#include "gpcorrect/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/parallel.hpp"
#include "gpcorrect/rff.hpp"
#include "gpcorrect/rng.hpp"

namespace gpc {

namespace {
constexpr std::uint64_t kRandomPickStream = 0x72616e64ULL;  // "rand"
constexpr std::uint64_t kStudyStream = 0x73747564ULL;       // "stud"
constexpr std::uint64_t kFeatureStream = 0x72666600ULL;
}  // namespace

StateList midpoint_grid(const Box& domain, std::size_t resolution) {
  domain.validate();
  if (resolution < 1) throw ArgumentError("midpoint_grid: resolution must be >= 1");
  const auto m = domain.dim();
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < m; ++i) total *= resolution;
  const State h = (domain.upper - domain.lower) / static_cast<double>(resolution);
  StateList pts;
  pts.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    State p(m);
    std::size_t rest = idx;
    for (Eigen::Index axis = m - 1; axis >= 0; --axis) {
      const std::size_t k = rest % resolution;
      rest /= resolution;
      p(axis) = domain.lower(axis) + (static_cast<double>(k) + 0.5) * h(axis);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

double field_error(const BatchField& estimate, const BatchField& truth, const Box& domain,
                   std::size_t resolution) {
  const StateList pts = midpoint_grid(domain, resolution);
  const Matrix a = estimate(pts);
  const Matrix b = truth(pts);
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != static_cast<Eigen::Index>(pts.size())) {
    throw ArgumentError("field_error: estimate and truth disagree in shape");
  }
  double cell = domain.volume();
  for (Eigen::Index i = 0; i < domain.dim(); ++i) cell /= static_cast<double>(resolution);
  return (a - b).rowwise().norm().sum() * cell;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::design: return "design";
    case Method::random: return "random";
    case Method::agnostic: return "agnostic";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "design") return Method::design;
  if (name == "random") return Method::random;
  if (name == "agnostic") return Method::agnostic;
  throw ArgumentError("unknown method '" + name + "'");
}

double BenchReport::mean_error(Method method, std::size_t budget) const {
  for (const auto& s : summaries) {
    if (s.method == method && s.budget == budget) return s.mean;
  }
  throw ArgumentError("BenchReport: no summary for " + to_string(method) + " at budget " +
                      std::to_string(budget));
}

std::uint64_t realization_seed(std::uint64_t master, std::size_t realization) {
  return derive_seed(master, realization);
}

ObservationSet observe_candidates(const Scenario& scenario, const std::vector<Trajectory>& truth,
                                  const std::vector<std::size_t>& candidates, std::uint64_t seed) {
  std::vector<Trajectory> picked;
  picked.reserve(candidates.size());
  for (auto c : candidates) picked.push_back(truth.at(c));
  const ObservationSet full =
      sample_corrections(scenario.system, picked, scenario.system_noise(seed), candidates);
  return project(full, scenario.kernel_inputs, scenario.learned_outputs);
}

VectorField corrected_field(const Scenario& scenario, std::function<State(const State&)> correction) {
  const auto inputs = scenario.kernel_inputs;
  const auto outputs = scenario.learned_outputs;
  const VectorField g = scenario.system.known_term;
  return [g, inputs, outputs, correction](const State& y) -> State {
    State x(static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t i = 0; i < inputs.size(); ++i) x(static_cast<Eigen::Index>(i)) = y(inputs[i]);
    const State f = correction(x);
    State out = g(y);
    for (std::size_t i = 0; i < outputs.size(); ++i) out(outputs[i]) += f(static_cast<Eigen::Index>(i));
    return out;
  };
}

namespace {

BatchField batch_of(std::function<State(const State&)> f, int p) {
  return [f, p](const StateList& pts) {
    Matrix out(static_cast<Eigen::Index>(pts.size()), p);
    parallel_for(pts.size(), [&](std::size_t i) {
      out.row(static_cast<Eigen::Index>(i)) = f(pts[i]).transpose();
    });
    return out;
  };
}

Matrix known_batch(const Scenario& s, const StateList& pts) {
  return batch_of([&s](const State& x) { return s.known_slice(x); }, s.learned_dim())(pts);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::size_t> nested_random_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(seed, kRandomPickStream);
  for (std::size_t i = 0; i + 1 < n; ++i) std::swap(order[i], order[i + rng.index(n - i)]);
  return order;
}

}  // namespace

BenchReport run_comparison(const Scenario& scenario, const std::vector<Method>& methods,
                           std::size_t realizations, std::vector<std::size_t> budgets) {
  using Clock = std::chrono::steady_clock;
  if (methods.empty()) throw ArgumentError("run_comparison: no methods requested");
  if (realizations < 1) throw ArgumentError("run_comparison: realizations must be >= 1");
  if (budgets.empty()) budgets = scenario.config.budgets;
  if (budgets.empty()) budgets = {scenario.config.design_budget};
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  const std::size_t kmax = budgets.back();
  if (kmax > scenario.candidates.size()) throw ArgumentError("run_comparison: budget exceeds candidates");

  const ScenarioConfig& cfg = scenario.config;
  BenchReport report;
  report.scenario = cfg.scenario;
  report.master_seed = cfg.seed;
  report.realizations = realizations;
  report.budgets = budgets;
  report.methods = methods;

  const bool need_design = std::any_of(methods.begin(), methods.end(),
                                       [](Method m) { return m != Method::random; });
  if (need_design) {
    const auto t0 = Clock::now();
    const DesignProblem problem = scenario.design_problem(kmax);
    const DesignResult dr = cfg.algorithm == "greedy" ? greedy_design(problem) : lazy_greedy_design(problem);
    report.design_order = dr.selected_indices;
    report.timings["design_selection"] = std::chrono::duration<double>(Clock::now() - t0).count();
  }

  const std::vector<Trajectory> truth =
      true_states(scenario.system, scenario.candidates, cfg.grid(), cfg.substeps);

  const int p = scenario.learned_dim();
  const BatchField truth_field = batch_of([&scenario](const State& x) { return scenario.correction_slice(x); }, p);
  const BatchField zero_field = [p](const StateList& pts) {
    return Matrix::Zero(static_cast<Eigen::Index>(pts.size()), p).eval();
  };
  report.correction_energy = field_error(zero_field, truth_field, scenario.metric_box, cfg.metric_resolution);
  report.full_energy = field_error(
      zero_field,
      [&](const StateList& pts) { return (truth_field(pts) + known_batch(scenario, pts)).eval(); },
      scenario.metric_box, cfg.metric_resolution);

  struct Job {
    std::size_t realization;
    Method method;
    std::size_t budget;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < realizations; ++r) {
    for (Method m : methods) {
      for (auto k : budgets) jobs.push_back({r, m, k});
    }
  }
  std::vector<BenchRow> rows(jobs.size());
  std::vector<double> seconds(jobs.size(), 0.0);
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto t0 = Clock::now();
    const Job& job = jobs[j];
    BenchRow& row = rows[j];
    row.realization = job.realization;
    row.method = job.method;
    row.budget = job.budget;
    row.seed = realization_seed(cfg.seed, job.realization);
    if (job.method == Method::random) {
      const auto order = nested_random_order(scenario.candidates.size(), row.seed);
      row.seeds.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(job.budget));
    } else {
      row.seeds.assign(report.design_order.begin(),
                       report.design_order.begin() + static_cast<std::ptrdiff_t>(job.budget));
    }
    ObservationSet obs = observe_candidates(scenario, truth, row.seeds, row.seed);
    if (job.method == Method::agnostic) {
      // Learn the whole right-hand side: add G back at the sampled full states.
      std::size_t at = 0;
      for (auto c : row.seeds) {
        for (const auto& y : truth[c].states) {
          const State g = scenario.system.known_term(y);
          for (int i = 0; i < p; ++i) obs.samples[at].value(i) += g(scenario.learned_outputs[static_cast<std::size_t>(i)]);
          ++at;
        }
      }
      const GpPosterior gp = GpPosterior::fit(obs, cfg.agnostic_kernel);
      const BatchField est = [&](const StateList& pts) {
        return (gp.mean(pts) - known_batch(scenario, pts)).eval();
      };
      row.error = field_error(est, truth_field, scenario.metric_box, cfg.metric_resolution);
    } else {
      const GpPosterior gp = GpPosterior::fit(obs, cfg.kernel);
      const BatchField est = [&](const StateList& pts) { return gp.mean(pts); };
      row.error = field_error(est, truth_field, scenario.metric_box, cfg.metric_resolution);
    }
    seconds[j] = std::chrono::duration<double>(Clock::now() - t0).count();
  });
  report.rows = std::move(rows);
  for (std::size_t j = 0; j < jobs.size(); ++j) report.timings[to_string(jobs[j].method)] += seconds[j];

  for (Method m : methods) {
    for (auto k : budgets) {
      std::vector<double> errs;
      for (const auto& row : report.rows) {
        if (row.method == m && row.budget == k) errs.push_back(row.error);
      }
      MethodSummary s;
      s.method = m;
      s.budget = k;
      s.mean = mean_of(errs);
      double var = 0.0;
      for (double e : errs) var += (e - s.mean) * (e - s.mean);
      s.stddev = errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0;
      s.min = *std::min_element(errs.begin(), errs.end());
      s.max = *std::max_element(errs.begin(), errs.end());
      report.summaries.push_back(s);
    }
  }
  return report;
}

namespace {

double sup_error(const Trajectory& a, const Trajectory& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) e = std::max(e, (a.states[i] - b.states[i]).norm());
  return e;
}

}  // namespace

TrajectoryStudy trajectory_study(const Scenario& scenario, std::size_t train_count,
                                 std::size_t test_count, std::uint64_t seed,
                                 std::size_t rff_features) {
  if (train_count < 1 || test_count < 1) throw ArgumentError("trajectory_study: empty train or test set");
  const ScenarioConfig& cfg = scenario.config;
  const TimeGrid grid = cfg.grid();
  Rng rng = Rng::stream(seed, kStudyStream);

  // Training and test initial conditions: uniform over the domain box for
  // the box scenario, distinct candidates otherwise.
  StateList train, test;
  if (cfg.scenario == ScenarioKind::linear_quadratic) {
    auto draw = [&]() {
      State y(scenario.system.dim);
      for (int i = 0; i < scenario.system.dim; ++i) {
        y(i) = rng.uniform(scenario.system.domain.lower(i), scenario.system.domain.upper(i));
      }
      return y;
    };
    for (std::size_t i = 0; i < train_count; ++i) train.push_back(draw());
    for (std::size_t i = 0; i < test_count; ++i) test.push_back(draw());
  } else {
    if (train_count + test_count > scenario.candidates.size()) {
      throw ArgumentError("trajectory_study: not enough candidates");
    }
    const auto order = nested_random_order(scenario.candidates.size(), seed);
    for (std::size_t i = 0; i < train_count; ++i) train.push_back(scenario.candidates[order[i]]);
    for (std::size_t i = 0; i < test_count; ++i) test.push_back(scenario.candidates[order[train_count + i]]);
  }

  const auto truth = true_states(scenario.system, train, grid, cfg.substeps);
  std::vector<std::size_t> ids(train.size());
  std::iota(ids.begin(), ids.end(), 0);
  const ObservationSet obs = project(
      sample_corrections(scenario.system, truth, scenario.system_noise(seed), ids),
      scenario.kernel_inputs, scenario.learned_outputs);
  const GpPosterior gp = GpPosterior::fit(obs, cfg.kernel);
  const VectorField gp_field = corrected_field(scenario, [&gp](const State& x) { return gp.mean(x); });

  std::optional<RffModel> rff;
  VectorField rff_field;
  if (rff_features > 0) {
    const FeatureMap map = sample_features(cfg.kernel, static_cast<int>(scenario.kernel_inputs.size()),
                                           rff_features, derive_seed(seed, kFeatureStream));
    rff = fit_ridge(obs, map, cfg.rff_ridge);
    rff_field = corrected_field(scenario, [&rff](const State& x) { return emulate_query(*rff, x); });
  }

  TrajectoryStudy study;
  study.train_count = train_count;
  study.proxy_errors.resize(test.size());
  study.gp_errors.resize(test.size());
  study.rff_errors.assign(rff ? test.size() : 0, 0.0);
  std::vector<double> gaps(test.size(), 0.0);
  parallel_for(test.size(), [&](std::size_t i) {
    const Trajectory real = integrate_rk4(scenario.system, true, test[i], grid, cfg.substeps);
    const Trajectory proxy = integrate_rk4(scenario.system, false, test[i], grid, cfg.substeps);
    const Trajectory fixed = integrate_field(gp_field, scenario.system.dim, test[i], grid, cfg.substeps,
                                             ModelTag::emulated_model);
    study.proxy_errors[i] = sup_error(real, proxy);
    study.gp_errors[i] = sup_error(real, fixed);
    if (rff) {
      const Trajectory emu = integrate_field(rff_field, scenario.system.dim, test[i], grid, cfg.substeps,
                                             ModelTag::emulated_model);
      study.rff_errors[i] = sup_error(real, emu);
      gaps[i] = (emu.states.back() - fixed.states.back()).norm();
    }
  });
  std::size_t gp_better = 0, rff_better = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    gp_better += study.gp_errors[i] < study.proxy_errors[i] ? 1 : 0;
    if (rff) rff_better += study.rff_errors[i] < study.proxy_errors[i] ? 1 : 0;
  }
  study.gp_improved_fraction = static_cast<double>(gp_better) / static_cast<double>(test.size());
  study.rff_improved_fraction = static_cast<double>(rff_better) / static_cast<double>(test.size());
  study.rff_gp_endpoint_gap = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
  return study;
}

}  // namespace gpc
