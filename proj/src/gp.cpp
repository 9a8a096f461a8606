#include "gpcorrect/gp.hpp"

#include <cmath>
#include <string>

#include "gpcorrect/errors.hpp"

namespace gpc {

void GpPosterior::factorize(const JitterPolicy& jitter) {
  gram_ = kernel_matrix(kernel_, states_);
  const int d = noise_.dim();
  factors_.clear();
  factor_index_.assign(static_cast<std::size_t>(d), 0);
  std::vector<double> variances;
  jitter_used_ = 0.0;
  for (int c = 0; c < d; ++c) {
    const double var = noise_.covariance(c, c);
    std::size_t slot = variances.size();
    for (std::size_t s = 0; s < variances.size(); ++s) {
      if (variances[s] == var) slot = s;
    }
    if (slot == variances.size()) {
      Matrix a = gram_;
      a.diagonal().array() += var;
      factors_.push_back(cholesky_with_jitter(a, kernel_.signal_variance, "gp fit", jitter));
      variances.push_back(var);
      jitter_used_ = std::max(jitter_used_, factors_.back().jitter);
    }
    factor_index_[static_cast<std::size_t>(c)] = slot;
  }
}

namespace {

// Diagonal with nonnegative entries; zero variance means noise-free interpolation.
void check_fit_noise(const NoiseModel& noise) {
  const Matrix& c = noise.covariance;
  if (c.rows() == 0 || c.rows() != c.cols()) throw ArgumentError("gp: noise covariance must be square");
  if (!noise.is_diagonal()) throw ArgumentError("gp: noise covariance must be diagonal");
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (!(c(i, i) >= 0.0) || !std::isfinite(c(i, i))) throw ArgumentError("gp: noise variances must be >= 0");
  }
}

}  // namespace

GpPosterior GpPosterior::fit(const ObservationSet& observations, const KernelConfig& kernel,
                             const JitterPolicy& jitter) {
  if (observations.empty()) throw ArgumentError("gp fit: no observations");
  kernel.validate();
  check_fit_noise(observations.noise);
  if (observations.noise.dim() != observations.output_dim()) {
    throw ArgumentError("gp fit: noise dimension != value dimension");
  }

  GpPosterior gp;
  gp.states_ = observations.states();
  gp.kernel_ = kernel;
  gp.noise_ = observations.noise;
  gp.factorize(jitter);

  const Matrix y = observations.values();
  gp.weights_.resize(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    gp.weights_.col(c) = gp.factor(static_cast<int>(c)).llt.solve(y.col(c));
  }
  return gp;
}

GpPosterior GpPosterior::restore(StateList states, const KernelConfig& kernel,
                                 const NoiseModel& noise, Matrix weights) {
  if (states.empty()) throw ArgumentError("gp restore: no training states");
  if (weights.rows() != static_cast<Eigen::Index>(states.size()) ||
      weights.cols() != noise.dim()) {
    throw ArgumentError("gp restore: weights shape does not match states/noise");
  }
  kernel.validate();
  check_fit_noise(noise);
  GpPosterior gp;
  gp.states_ = std::move(states);
  gp.kernel_ = kernel;
  gp.noise_ = noise;
  gp.weights_ = std::move(weights);
  gp.factorize({});
  return gp;
}

const CholeskyFactor& GpPosterior::factor(int component) const {
  if (component < 0 || component >= output_dim()) {
    throw ArgumentError("gp: component index out of range");
  }
  return factors_[factor_index_[static_cast<std::size_t>(component)]];
}

Matrix GpPosterior::regularized_kernel(int component) const {
  Matrix a = gram_;
  a.diagonal().array() += noise_.covariance(component, component) + factor(component).jitter;
  return a;
}

void GpPosterior::check_query(const State& q) const {
  if (q.size() != input_dim()) {
    throw ArgumentError("gp query has dimension " + std::to_string(q.size()) +
                        ", expected " + std::to_string(input_dim()));
  }
}

Matrix GpPosterior::mean(const StateList& queries) const {
  for (const auto& q : queries) check_query(q);
  if (queries.empty()) return Matrix(0, output_dim());
  return kernel_matrix(kernel_, queries, states_) * weights_;
}

State GpPosterior::mean(const State& query) const {
  check_query(query);
  State k(static_cast<Eigen::Index>(states_.size()));
  for (std::size_t j = 0; j < states_.size(); ++j) {
    k(static_cast<Eigen::Index>(j)) = kernel_eval(kernel_, query, states_[j]);
  }
  return weights_.transpose() * k;
}

std::vector<Matrix> GpPosterior::cov(const StateList& queries) const {
  for (const auto& q : queries) check_query(q);
  if (queries.empty()) return std::vector<Matrix>(static_cast<std::size_t>(output_dim()));
  const Matrix kqq = kernel_matrix(kernel_, queries);
  const Matrix kxq = kernel_matrix(kernel_, states_, queries);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(output_dim()));
  std::vector<Matrix> per_factor(factors_.size());
  for (std::size_t s = 0; s < factors_.size(); ++s) {
    const Matrix v = factors_[s].llt.matrixL().solve(kxq);
    per_factor[s] = kqq - v.transpose() * v;
    per_factor[s] = (0.5 * (per_factor[s] + per_factor[s].transpose())).eval();
  }
  for (int c = 0; c < output_dim(); ++c) {
    out.push_back(per_factor[factor_index_[static_cast<std::size_t>(c)]]);
  }
  return out;
}

}  // namespace gpc
