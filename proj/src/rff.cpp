#include "gpcorrect/rff.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/parallel.hpp"
#include "gpcorrect/rng.hpp"

namespace gpc {

FeatureMap sample_features(const KernelConfig& kernel, int input_dim, std::size_t features,
                           std::uint64_t seed) {
  if (kernel.family != KernelFamily::gaussian_rbf) {
    throw UnsupportedKernelError("sample_features: random features need a gaussian_rbf kernel");
  }
  kernel.validate();
  if (input_dim < 1 || features < 1) throw ArgumentError("sample_features: empty feature map");

  FeatureMap map;
  map.features = features;
  map.input_dim = input_dim;
  map.seed = seed;
  map.kernel = kernel;
  map.scale = std::sqrt(2.0 * kernel.signal_variance / static_cast<double>(features));
  const auto rows = static_cast<Eigen::Index>(features);
  map.w.resize(rows, input_dim);
  map.b.resize(rows);
  Rng rng(seed);
  const double inv_sigma = 1.0 / std::sqrt(kernel.bandwidth);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int c = 0; c < input_dim; ++c) map.w(i, c) = rng.normal() * inv_sigma;
  }
  for (Eigen::Index i = 0; i < rows; ++i) map.b(i) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return map;
}

Eigen::VectorXd featurize(const FeatureMap& map, const State& y) {
  if (y.size() != map.input_dim) throw ArgumentError("featurize: dimension mismatch");
  return map.scale * (map.w * y + map.b).array().cos().matrix();
}

namespace {

template <class Loop>
Matrix assemble(const FeatureMap& map, const StateList& states, Loop&& loop) {
  for (const auto& y : states) {
    if (y.size() != map.input_dim) throw ArgumentError("feature_matrix: dimension mismatch");
  }
  Matrix z(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(map.features));
  loop(states.size(), [&](std::size_t i) {
    z.row(static_cast<Eigen::Index>(i)) = featurize(map, states[i]).transpose();
  });
  return z;
}

}  // namespace

Matrix feature_matrix(const FeatureMap& map, const StateList& states) {
  return assemble(map, states, [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

namespace serial {
Matrix feature_matrix(const FeatureMap& map, const StateList& states) {
  return assemble(map, states, [](std::size_t n, auto&& body) { serial_for(n, body); });
}
}  // namespace serial

RffModel fit_ridge(const ObservationSet& observations, const FeatureMap& map,
                   std::optional<double> ridge, RidgeForm form) {
  if (observations.empty()) throw ArgumentError("fit_ridge: no observations");
  const double lambda = ridge.value_or(observations.noise.covariance.diagonal().mean());
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("fit_ridge: ridge must be positive");

  const Matrix z = feature_matrix(map, observations.states());
  const Matrix f = observations.values();
  const bool primal = form == RidgeForm::primal ||
                      (form == RidgeForm::automatic && z.rows() > z.cols());
  RffModel model{map, Matrix(), lambda};
  if (primal) {
    Matrix a = z.transpose() * z;
    a.diagonal().array() += lambda;
    const auto chol = cholesky_with_jitter(a, lambda, "fit_ridge (primal)");
    model.theta_hat = chol.llt.solve(z.transpose() * f);
  } else {
    Matrix a = z * z.transpose();
    a.diagonal().array() += lambda;
    const auto chol = cholesky_with_jitter(a, lambda, "fit_ridge (dual)");
    model.theta_hat = z.transpose() * chol.llt.solve(f);
  }
  return model;
}

State emulate_query(const RffModel& model, const State& y) {
  return model.theta_hat.transpose() * featurize(model.features, y);
}

Trajectory emulate_trajectory(const SystemSpec& system, const RffModel& model, const State& y0,
                              const TimeGrid& grid, int substeps) {
  if (model.features.input_dim != system.dim || model.output_dim() != system.dim) {
    throw ArgumentError("emulate_trajectory: model must map the full state to the full state");
  }
  const VectorField& g = system.known_term;
  VectorField field = [&g, &model](const State& y) -> State { return g(y) + emulate_query(model, y); };
  return integrate_field(field, system.dim, y0, grid, substeps, ModelTag::emulated_model);
}

std::uint64_t feature_checksum(const FeatureMap& map) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  if (map.w.rows() == 0) return h;
  char buf[64];
  for (Eigen::Index c = 0; c < map.w.cols(); ++c) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), map.w(0, c));
    for (const char* p = buf; p != res.ptr; ++p) {
      h ^= static_cast<unsigned char>(*p);
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<unsigned char>(';');
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gpc
