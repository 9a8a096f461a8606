#include "gpcorrect/design.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/parallel.hpp"
#include "gpcorrect/rng.hpp"

namespace gpc {

// ---------------------------------------------------------------------------
// Problem and proxy cache

void DesignProblem::validate() const {
  system.validate();
  kernel.validate();
  noise.validate();
  if (candidate_seeds.empty()) throw ArgumentError("DesignProblem: no candidates");
  if (budget < 1) throw ArgumentError("DesignProblem: budget must be >= 1");
  if (budget > candidate_seeds.size()) {
    throw ArgumentError("DesignProblem: budget exceeds candidate count");
  }
  if (substeps < 1) throw ArgumentError("DesignProblem: substeps must be >= 1");
  for (int c : kernel_inputs) {
    if (c < 0 || c >= system.dim) throw ArgumentError("DesignProblem: kernel input out of range");
  }
  for (std::size_t i = 0; i < candidate_seeds.size(); ++i) {
    if (candidate_seeds[i].size() != system.dim) {
      throw ArgumentError("DesignProblem: candidate " + std::to_string(i) + " has wrong dimension");
    }
    if (!system.domain.contains(candidate_seeds[i], 1e-12)) {
      throw ArgumentError("DesignProblem: candidate " + std::to_string(i) + " outside domain");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (candidate_seeds[i] == candidate_seeds[j]) {
        throw ArgumentError("DesignProblem: candidates " + std::to_string(j) + " and " +
                            std::to_string(i) + " coincide");
      }
    }
  }
}

ProxyCache::ProxyCache(const DesignProblem& problem) {
  problem.validate();
  const auto trajectories =
      proxy_states(problem.system, problem.candidate_seeds, problem.grid, problem.substeps);
  samples_ = problem.grid.size();
  states_.reserve(trajectories.size());
  for (const auto& traj : trajectories) {
    StateList projected;
    projected.reserve(traj.states.size());
    for (const auto& y : traj.states) {
      if (problem.kernel_inputs.empty()) {
        projected.push_back(y);
      } else {
        State p(static_cast<Eigen::Index>(problem.kernel_inputs.size()));
        for (std::size_t a = 0; a < problem.kernel_inputs.size(); ++a) {
          p(static_cast<Eigen::Index>(a)) = y(problem.kernel_inputs[a]);
        }
        projected.push_back(std::move(p));
      }
    }
    states_.push_back(std::move(projected));
  }
}

StateList ProxyCache::gather(const std::vector<std::size_t>& subset) const {
  StateList out;
  out.reserve(subset.size() * samples_);
  for (auto i : subset) {
    const auto& s = states_.at(i);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Objective

MiObjective::MiObjective(const KernelConfig& kernel, const NoiseModel& noise, bool force_block)
    : kernel_(kernel), noise_(noise) {
  kernel_.validate();
  noise_.validate();
  d_ = noise_.dim();
  block_ = force_block || !noise_.is_isotropic();
  if (block_) {
    scale_ = 1.0;
    noise_term_ = log_det_spd(noise_.covariance, noise_.min_singular_value(), "noise covariance");
  } else {
    scale_ = static_cast<double>(d_);
    noise_term_ = static_cast<double>(d_) * std::log(noise_.covariance(0, 0));
  }
}

Matrix MiObjective::cross_covariance(const StateList& a, const StateList& b) const {
  const Matrix k = kernel_matrix(kernel_, a, b);
  if (!block_) return k;
  Matrix out = Matrix::Zero(k.rows() * d_, k.cols() * d_);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      for (int c = 0; c < d_; ++c) out(i * d_ + c, j * d_ + c) = k(i, j);
    }
  }
  return out;
}

Matrix MiObjective::joint_covariance(const StateList& states) const {
  Matrix m = block_ ? cross_covariance(states, states) : kernel_matrix(kernel_, states);
  const auto n = static_cast<Eigen::Index>(states.size());
  if (block_) {
    for (Eigen::Index i = 0; i < n; ++i) m.block(i * d_, i * d_, d_, d_) += noise_.covariance;
  } else {
    m.diagonal().array() += noise_.covariance(0, 0);
  }
  return m;
}

double MiObjective::value(const StateList& states) const {
  if (states.empty()) return 0.0;
  const double logdet = log_det_spd(joint_covariance(states), kernel_.signal_variance, "mutual information");
  return scale_ * logdet - static_cast<double>(states.size()) * noise_term_;
}

MiObjective::Running::Schur MiObjective::Running::schur(const StateList& block) const {
  const MiObjective& obj = *objective_;
  Schur s;
  Matrix m = obj.joint_covariance(block);
  if (!states_.empty()) {
    const Matrix cross = obj.cross_covariance(states_, block);
    s.v = lower_.triangularView<Eigen::Lower>().solve(cross);
    m.noalias() -= s.v.transpose() * s.v;
  }
  s.factor = cholesky_with_jitter(m, obj.kernel_.signal_variance, "marginal gain");
  return s;
}

double MiObjective::Running::gain(const StateList& block) const {
  if (block.empty()) return 0.0;
  const Schur s = schur(block);
  return objective_->scale_ * s.factor.log_det() -
         static_cast<double>(block.size()) * objective_->noise_term_;
}

double MiObjective::Running::add(const StateList& block) {
  if (block.empty()) return 0.0;
  const Schur s = schur(block);
  const double g = objective_->scale_ * s.factor.log_det() -
                   static_cast<double>(block.size()) * objective_->noise_term_;
  const Eigen::Index old_n = lower_.rows();
  const Eigen::Index add_n = s.factor.size();
  Matrix grown = Matrix::Zero(old_n + add_n, old_n + add_n);
  if (old_n > 0) {
    grown.topLeftCorner(old_n, old_n) = lower_;
    grown.bottomLeftCorner(add_n, old_n) = s.v.transpose();
  }
  grown.bottomRightCorner(add_n, add_n) = s.factor.lower();
  lower_ = std::move(grown);
  states_.insert(states_.end(), block.begin(), block.end());
  value_ += g;
  return g;
}

namespace {

std::vector<std::size_t> checked_subset(const ProxyCache& cache, const std::vector<std::size_t>& seeds) {
  if (seeds.empty()) throw ArgumentError("mutual_information: empty seed subset");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] >= cache.candidate_count()) {
      throw ArgumentError("mutual_information: seed index " + std::to_string(seeds[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (seeds[i] == seeds[j]) throw ArgumentError("mutual_information: repeated seed index");
    }
  }
  return seeds;
}

}  // namespace

double mutual_information(const DesignProblem& problem, const std::vector<std::size_t>& seeds) {
  return mutual_information(problem, ProxyCache(problem), seeds);
}

double mutual_information(const DesignProblem& problem, const ProxyCache& cache,
                          const std::vector<std::size_t>& seeds) {
  const MiObjective objective(problem.kernel, problem.noise);
  return objective.value(cache.gather(checked_subset(cache, seeds)));
}

double mutual_information_block(const DesignProblem& problem, const ProxyCache& cache,
                                const std::vector<std::size_t>& seeds) {
  const MiObjective objective(problem.kernel, problem.noise, /*force_block=*/true);
  return objective.value(cache.gather(checked_subset(cache, seeds)));
}

// ---------------------------------------------------------------------------
// Greedy family

namespace {

/// Index of the largest gain among eligible entries, lowest index on ties.
std::size_t ordered_argmax(const std::vector<double>& gains, const std::vector<char>& eligible) {
  std::size_t best = gains.size();
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!eligible[i]) continue;
    if (best == gains.size() || gains[i] > gains[best]) best = i;
  }
  return best;
}

DesignResult finish(const DesignProblem& problem, const MiObjective::Running& running,
                    std::vector<std::size_t> picks, std::vector<double> gains,
                    std::size_t evaluations) {
  DesignResult r;
  r.selected_indices = std::move(picks);
  for (auto i : r.selected_indices) r.selected.push_back(problem.candidate_seeds[i]);
  r.gains = std::move(gains);
  r.objective = running.value();
  r.evaluations = evaluations;
  return r;
}

/// Greedy over candidates allowed by `admissible(i, picks)`, stopping after
/// `steps` picks or when nothing is admissible.
template <class Admissible, class OnPick, class Loop>
DesignResult run_greedy(const DesignProblem& problem, const ProxyCache& cache, std::size_t steps,
                        Admissible&& admissible, OnPick&& on_pick, Loop&& loop) {
  const MiObjective objective(problem.kernel, problem.noise);
  MiObjective::Running running(objective);
  const std::size_t n = cache.candidate_count();
  std::vector<char> taken(n, 0);
  std::vector<std::size_t> picks;
  std::vector<double> gains_out;
  std::size_t evaluations = 0;

  for (std::size_t step = 0; step < steps; ++step) {
    std::vector<char> eligible(n, 0);
    for (std::size_t i = 0; i < n; ++i) eligible[i] = !taken[i] && admissible(i);
    std::vector<double> gains(n, 0.0);
    loop(n, [&](std::size_t i) {
      if (eligible[i]) gains[i] = running.gain(cache.states(i));
    });
    for (char e : eligible) evaluations += e ? 1 : 0;
    const std::size_t best = ordered_argmax(gains, eligible);
    if (best == n) break;
    running.add(cache.states(best));
    taken[best] = 1;
    on_pick(best);
    picks.push_back(best);
    gains_out.push_back(gains[best]);
  }
  return finish(problem, running, std::move(picks), std::move(gains_out), evaluations);
}

auto parallel_loop = [](std::size_t n, auto&& body) { parallel_for(n, body); };

}  // namespace

DesignResult greedy_design(const DesignProblem& problem) {
  return greedy_design(problem, ProxyCache(problem));
}

DesignResult greedy_design(const DesignProblem& problem, const ProxyCache& cache) {
  return run_greedy(
      problem, cache, problem.budget, [](std::size_t) { return true; }, [](std::size_t) {},
      parallel_loop);
}

namespace serial {

DesignResult greedy_design(const DesignProblem& problem, const ProxyCache& cache) {
  const MiObjective objective(problem.kernel, problem.noise);
  const std::size_t n = cache.candidate_count();
  std::vector<char> taken(n, 0);
  std::vector<std::size_t> picks;
  std::vector<double> gains_out;
  std::size_t evaluations = 0;
  double current = 0.0;
  for (std::size_t step = 0; step < problem.budget; ++step) {
    std::size_t best = n;
    double best_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      auto trial = picks;
      trial.push_back(i);
      const double v = objective.value(cache.gather(trial));
      ++evaluations;
      if (best == n || v > best_value) {
        best = i;
        best_value = v;
      }
    }
    taken[best] = 1;
    picks.push_back(best);
    gains_out.push_back(best_value - current);
    current = best_value;
  }
  DesignResult r;
  r.selected_indices = std::move(picks);
  for (auto i : r.selected_indices) r.selected.push_back(problem.candidate_seeds[i]);
  r.gains = std::move(gains_out);
  r.objective = current;
  r.evaluations = evaluations;
  return r;
}

}  // namespace serial

DesignResult lazy_greedy_design(const DesignProblem& problem) {
  return lazy_greedy_design(problem, ProxyCache(problem));
}

DesignResult lazy_greedy_design(const DesignProblem& problem, const ProxyCache& cache) {
  const MiObjective objective(problem.kernel, problem.noise);
  MiObjective::Running running(objective);

  struct Entry {
    double bound;
    std::size_t index;
    std::size_t stamp;  // step at which bound was computed; SIZE_MAX = never
  };
  // Max-heap on bound, lowest index first among equal bounds.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.index > b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  constexpr std::size_t kNever = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < cache.candidate_count(); ++i) {
    heap.push({std::numeric_limits<double>::infinity(), i, kNever});
  }

  std::vector<std::size_t> picks;
  std::vector<double> gains;
  std::size_t evaluations = 0;
  for (std::size_t step = 0; step < problem.budget && !heap.empty(); ++step) {
    while (true) {
      Entry top = heap.top();
      heap.pop();
      if (top.stamp == step) {
        running.add(cache.states(top.index));
        picks.push_back(top.index);
        gains.push_back(top.bound);
        break;
      }
      top.bound = running.gain(cache.states(top.index));
      top.stamp = step;
      ++evaluations;
      heap.push(top);
    }
  }
  return finish(problem, running, std::move(picks), std::move(gains), evaluations);
}

DesignResult partition_matroid_greedy(const DesignProblem& problem,
                                      const std::vector<int>& partition,
                                      const std::map<int, std::size_t>& limits) {
  return partition_matroid_greedy(problem, ProxyCache(problem), partition, limits);
}

DesignResult partition_matroid_greedy(const DesignProblem& problem, const ProxyCache& cache,
                                      const std::vector<int>& partition,
                                      const std::map<int, std::size_t>& limits) {
  if (partition.size() != cache.candidate_count()) {
    throw ArgumentError("partition_matroid_greedy: partition must cover every candidate");
  }
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (!limits.contains(partition[i])) {
      throw ArgumentError("partition_matroid_greedy: group " + std::to_string(partition[i]) +
                          " of candidate " + std::to_string(i) + " has no limit");
    }
  }
  for (const auto& [group, limit] : limits) {
    if (limit < 1) throw ArgumentError("partition_matroid_greedy: limits must be positive");
  }
  std::map<int, std::size_t> used;
  return run_greedy(
      problem, cache, problem.budget,
      [&](std::size_t i) { return used[partition[i]] < limits.at(partition[i]); },
      [&](std::size_t i) { ++used[partition[i]]; }, parallel_loop);
}

DesignResult exhaustive_design(const DesignProblem& problem) {
  return exhaustive_design(problem, ProxyCache(problem));
}

DesignResult exhaustive_design(const DesignProblem& problem, const ProxyCache& cache) {
  const std::size_t n = cache.candidate_count();
  const std::size_t k = problem.budget;
  double combos = 1.0;
  for (std::size_t i = 0; i < k; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  if (combos > kExhaustiveLimit) {
    throw SizeError("exhaustive_design: " + std::to_string(static_cast<long long>(combos)) +
                    " subsets exceed the enumeration limit");
  }
  const MiObjective objective(problem.kernel, problem.noise);
  std::vector<std::size_t> subset(k);
  for (std::size_t i = 0; i < k; ++i) subset[i] = i;
  std::vector<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  while (true) {
    const double v = objective.value(cache.gather(subset));
    ++evaluations;
    if (v > best_value) {
      best_value = v;
      best = subset;
    }
    // Next k-combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && subset[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }

  // Order the optimal set greedily within itself so gains are non-increasing.
  MiObjective::Running running(objective);
  std::vector<std::size_t> remaining = best;
  std::vector<std::size_t> picks;
  std::vector<double> gains;
  while (!remaining.empty()) {
    std::size_t arg = 0;
    double g_best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const double g = running.gain(cache.states(remaining[r]));
      if (g > g_best) {
        g_best = g;
        arg = r;
      }
    }
    running.add(cache.states(remaining[arg]));
    picks.push_back(remaining[arg]);
    gains.push_back(g_best);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(arg));
  }
  DesignResult r;
  r.selected_indices = std::move(picks);
  for (auto i : r.selected_indices) r.selected.push_back(problem.candidate_seeds[i]);
  r.gains = std::move(gains);
  r.objective = best_value;
  r.evaluations = evaluations;
  return r;
}

// ---------------------------------------------------------------------------
// Proxy discrepancy bounds

double discrepancy_bound_generic(double delta, int d, std::size_t k_tilde, const NoiseModel& noise) {
  if (!(delta >= 0.0)) throw ArgumentError("discrepancy bound: delta must be >= 0");
  if (d < 1 || k_tilde < 1) throw ArgumentError("discrepancy bound: d and K~ must be positive");
  if (delta == 0.0) return 0.0;
  const double n = static_cast<double>(d) * static_cast<double>(k_tilde);
  const double x = delta * std::pow(n, 1.5) / noise.min_singular_value();
  if (!(x < 1.0)) return kInfiniteBound;
  return -n * std::log1p(-x);
}

double discrepancy_bound_rbf(double lipschitz, double deviation, int d, std::size_t k_tilde,
                             const NoiseModel& noise) {
  if (!(lipschitz >= 0.0) || !(deviation >= 0.0)) {
    throw ArgumentError("discrepancy_bound_rbf: L and Delta must be >= 0");
  }
  return discrepancy_bound_generic(2.0 * lipschitz * deviation, d, k_tilde, noise);
}

double poly_kernel_discrepancy(int order, double radius, double deviation) {
  if (order < 1 || !(radius >= 0.0) || !(deviation >= 0.0)) {
    throw ArgumentError("poly_kernel_discrepancy: invalid arguments");
  }
  return order * deviation * (2.0 * radius + deviation) * std::pow(1.0 + radius * radius, order - 1);
}

double discrepancy_bound_poly(int order, double radius, double deviation, int d,
                              std::size_t k_tilde, const NoiseModel& noise) {
  return discrepancy_bound_generic(poly_kernel_discrepancy(order, radius, deviation), d, k_tilde, noise);
}

BoundValidationReport validate_bound(const DesignProblem& problem,
                                     const std::vector<std::size_t>& seeds,
                                     double perturbation, std::size_t trials,
                                     std::uint64_t seed) {
  if (!(perturbation >= 0.0)) throw ArgumentError("validate_bound: perturbation must be >= 0");
  const ProxyCache cache(problem);
  const StateList proxy = cache.gather(checked_subset(cache, seeds));
  const MiObjective objective(problem.kernel, problem.noise);
  const double mi_proxy = objective.value(proxy);
  const Matrix k_proxy = kernel_matrix(problem.kernel, proxy);
  const auto m = proxy.front().size();

  BoundValidationReport report;
  report.k_tilde = proxy.size();
  report.output_dim = problem.output_dim();
  report.trials.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);
    StateList moved = proxy;
    for (auto& y : moved) {
      State dir(m);
      for (Eigen::Index c = 0; c < m; ++c) dir(c) = rng.normal();
      const double radius = perturbation * std::pow(rng.uniform(), 1.0 / static_cast<double>(m));
      const double norm = dir.norm();
      if (norm > 0.0) y += (radius / norm) * dir;
    }
    BoundTrial& trial = report.trials[t];
    trial.delta_hat = (kernel_matrix(problem.kernel, moved) - k_proxy).cwiseAbs().maxCoeff();
    trial.difference = std::abs(objective.value(moved) - mi_proxy);
    trial.bound = discrepancy_bound_generic(trial.delta_hat, report.output_dim, report.k_tilde,
                                            problem.noise);
    trial.vacuous = std::isinf(trial.bound);
    trial.within = trial.vacuous || trial.difference <= trial.bound;
    trial.ratio = (trial.vacuous || trial.bound == 0.0) ? 0.0 : trial.difference / trial.bound;
  });
  for (const auto& t : report.trials) {
    report.max_ratio = std::max(report.max_ratio, t.ratio);
    report.vacuous_trials += t.vacuous ? 1 : 0;
    report.all_within = report.all_within && t.within;
  }
  return report;
}

double mi_lower_bound(const DesignProblem& problem, const std::vector<std::size_t>& seeds) {
  return mi_lower_bound(problem, ProxyCache(problem), seeds);
}

double mi_lower_bound(const DesignProblem& problem, const ProxyCache& cache,
                      const std::vector<std::size_t>& seeds) {
  if (!problem.noise.is_isotropic()) {
    throw ModeError("mi_lower_bound: requires isotropic noise covariance");
  }
  const StateList states = cache.gather(checked_subset(cache, seeds));
  const double lambda = std::max(0.0, min_eigenvalue_symmetric(kernel_matrix(problem.kernel, states)));
  const double n = static_cast<double>(problem.output_dim()) * static_cast<double>(states.size());
  return n * std::log1p(lambda / problem.noise.covariance(0, 0));
}

}  // namespace gpc
