#pragma once

#include <vector>

#include "gpcorrect/kernels.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/observation.hpp"
#include "gpcorrect/types.hpp"

namespace gpc {

/// Zero-mean GP posterior for a vector field whose components are
/// independent and share one scalar kernel.  The noise covariance must be
/// diagonal, so component c is fit against K + sigma_c^2 I on its own.
/// Immutable after construction; queries are safe to run concurrently.
class GpPosterior {
 public:
  static GpPosterior fit(const ObservationSet& observations, const KernelConfig& kernel,
                         const JitterPolicy& jitter = {});

  /// Rebuild from a stored artifact: factors are recomputed, weights kept.
  static GpPosterior restore(StateList states, const KernelConfig& kernel,
                             const NoiseModel& noise, Matrix weights);

  const StateList& training_states() const { return states_; }
  const KernelConfig& kernel() const { return kernel_; }
  const NoiseModel& noise() const { return noise_; }
  /// K~ x d, one column per output component.
  const Matrix& weights() const { return weights_; }
  double jitter_used() const { return jitter_used_; }
  int input_dim() const { return static_cast<int>(states_.front().size()); }
  int output_dim() const { return static_cast<int>(weights_.cols()); }

  /// Cholesky factor of K + sigma_c^2 I (+ jitter) for component c.
  const CholeskyFactor& factor(int component) const;

  /// Regularized matrix that factor(component) decomposes.
  Matrix regularized_kernel(int component) const;

  /// |queries| x d.
  Matrix mean(const StateList& queries) const;
  State mean(const State& query) const;

  /// One |queries| x |queries| covariance per component.
  std::vector<Matrix> cov(const StateList& queries) const;

 private:
  GpPosterior() = default;
  void factorize(const JitterPolicy& jitter);
  void check_query(const State& q) const;

  StateList states_;
  KernelConfig kernel_;
  NoiseModel noise_;
  Matrix gram_;
  Matrix weights_;
  std::vector<CholeskyFactor> factors_;
  std::vector<std::size_t> factor_index_;
  double jitter_used_ = 0.0;
};

inline Matrix posterior_mean(const GpPosterior& gp, const StateList& queries) {
  return gp.mean(queries);
}

inline std::vector<Matrix> posterior_cov(const GpPosterior& gp, const StateList& queries) {
  return gp.cov(queries);
}

}  // namespace gpc
