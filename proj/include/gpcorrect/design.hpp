#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/kernels.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/observation.hpp"

namespace gpc {

/// Choose `budget` initial conditions out of `candidate_seeds` so that the
/// G-only (proxy) trajectories they generate are maximally informative
/// about the correction term.
struct DesignProblem {
  StateList candidate_seeds;
  std::size_t budget = 1;
  TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 2);
  KernelConfig kernel;
  /// Output-space noise; its dimension is the number of learned components.
  NoiseModel noise;
  SystemSpec system;
  int substeps = kDefaultSubsteps;
  /// State coordinates the kernel sees (empty: all of them).
  std::vector<int> kernel_inputs;

  int output_dim() const { return noise.dim(); }
  void validate() const;
};

struct DesignResult {
  std::vector<std::size_t> selected_indices;  // greedy order
  StateList selected;
  std::vector<double> gains;  // marginal MI per step
  double objective = 0.0;     // MI of the selected set
  std::size_t evaluations = 0;
};

/// Proxy states of every candidate, projected onto the kernel inputs,
/// integrated once and reused by every objective evaluation.
class ProxyCache {
 public:
  explicit ProxyCache(const DesignProblem& problem);

  std::size_t candidate_count() const { return states_.size(); }
  std::size_t samples_per_candidate() const { return samples_; }
  const StateList& states(std::size_t candidate) const { return states_.at(candidate); }
  StateList gather(const std::vector<std::size_t>& subset) const;

 private:
  std::vector<StateList> states_;
  std::size_t samples_ = 0;
};

/// log det Sigma_g - log det Sigma_{g|Theta} for noisy observations of a
/// d-component field with kernel k(y, y') I_d at a list of states.
///
/// Sigma_g = k(Y, Y) (x) I_d + I (x) Sigma_eps, Sigma_{g|Theta} = I (x) Sigma_eps.
/// With Sigma_eps = s^2 I the blocks decouple and the value is
/// d [log det(K + s^2 I) - n log s^2].
class MiObjective {
 public:
  MiObjective(const KernelConfig& kernel, const NoiseModel& noise, bool force_block = false);

  bool block_mode() const { return block_; }
  /// Rows of the joint covariance per state (1 in the isotropic fast path, d otherwise).
  int block_size() const { return block_ ? d_ : 1; }

  double value(const StateList& states) const;
  Matrix joint_covariance(const StateList& states) const;
  Matrix cross_covariance(const StateList& a, const StateList& b) const;

  /// Factor of the joint covariance of a growing selection.  Marginal gains
  /// come from the Schur complement of a new block against the current factor.
  class Running {
   public:
    explicit Running(const MiObjective& objective) : objective_(&objective) {}

    double value() const { return value_; }
    std::size_t state_count() const { return states_.size(); }

    /// MI(S u X) - MI(S) for a block of new states X.
    double gain(const StateList& block) const;
    /// Append X and update the factor; returns the gain.
    double add(const StateList& block);

   private:
    struct Schur {
      Matrix v;  // L^{-1} M_{S,X}
      CholeskyFactor factor;
    };
    Schur schur(const StateList& block) const;

    const MiObjective* objective_;
    StateList states_;
    Matrix lower_;
    double value_ = 0.0;
  };

 private:
  KernelConfig kernel_;
  NoiseModel noise_;
  bool block_;
  int d_;
  double scale_;       // log det multiplier: d (isotropic) or 1 (block)
  double noise_term_;  // log det of the per-state noise block
};

double mutual_information(const DesignProblem& problem, const std::vector<std::size_t>& seeds);
double mutual_information(const DesignProblem& problem, const ProxyCache& cache,
                          const std::vector<std::size_t>& seeds);
/// Always assembles the full dK~ x dK~ block matrix; oracle for the fast path.
double mutual_information_block(const DesignProblem& problem, const ProxyCache& cache,
                                const std::vector<std::size_t>& seeds);

DesignResult greedy_design(const DesignProblem& problem);
DesignResult greedy_design(const DesignProblem& problem, const ProxyCache& cache);
DesignResult lazy_greedy_design(const DesignProblem& problem);
DesignResult lazy_greedy_design(const DesignProblem& problem, const ProxyCache& cache);

/// partition[i] is the group of candidate i; at most limits[g] picks per group.
DesignResult partition_matroid_greedy(const DesignProblem& problem,
                                      const std::vector<int>& partition,
                                      const std::map<int, std::size_t>& limits);
DesignResult partition_matroid_greedy(const DesignProblem& problem, const ProxyCache& cache,
                                      const std::vector<int>& partition,
                                      const std::map<int, std::size_t>& limits);

inline constexpr double kExhaustiveLimit = 1e6;
DesignResult exhaustive_design(const DesignProblem& problem);
DesignResult exhaustive_design(const DesignProblem& problem, const ProxyCache& cache);

namespace serial {
/// Plain greedy that recomputes MI(S u {x}) from scratch for every candidate.
/// Reference for the incremental, parallel implementation.
DesignResult greedy_design(const DesignProblem& problem, const ProxyCache& cache);
}  // namespace serial

inline constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();

/// -n log(1 - delta n^{3/2} / sigma_min(Sigma_eps)) with n = d K~;
/// +infinity once the log argument is <= 0.
double discrepancy_bound_generic(double delta, int d, std::size_t k_tilde, const NoiseModel& noise);
/// Shift-invariant kernel with Lipschitz constant L and trajectory deviation Delta.
double discrepancy_bound_rbf(double lipschitz, double deviation, int d, std::size_t k_tilde,
                             const NoiseModel& noise);
/// Polynomial kernel of order m on a domain of radius B.
double discrepancy_bound_poly(int order, double radius, double deviation, int d,
                              std::size_t k_tilde, const NoiseModel& noise);
double poly_kernel_discrepancy(int order, double radius, double deviation);

struct BoundTrial {
  double delta_hat = 0.0;   // max |k(perturbed) - k(proxy)| entrywise
  double difference = 0.0;  // |MI(perturbed) - MI(proxy)|
  double bound = 0.0;
  double ratio = 0.0;       // difference / bound (0 if bound is 0 or infinite)
  bool vacuous = false;     // bound is infinite
  bool within = true;
};

struct BoundValidationReport {
  std::vector<BoundTrial> trials;
  double max_ratio = 0.0;
  std::size_t vacuous_trials = 0;
  bool all_within = true;
  std::size_t k_tilde = 0;
  int output_dim = 0;
};

/// Perturb every proxy state of `seeds` by a random vector of norm <= perturbation,
/// standing in for the unknown true trajectories, and check the MI difference
/// against the generic bound evaluated at the measured kernel discrepancy.
BoundValidationReport validate_bound(const DesignProblem& problem,
                                     const std::vector<std::size_t>& seeds,
                                     double perturbation, std::size_t trials,
                                     std::uint64_t seed);

/// d K~ log(1 + lambda_min(K) / s^2); requires Sigma_eps = s^2 I.
double mi_lower_bound(const DesignProblem& problem, const std::vector<std::size_t>& seeds);
double mi_lower_bound(const DesignProblem& problem, const ProxyCache& cache,
                      const std::vector<std::size_t>& seeds);

}  // namespace gpc
