#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/kernels.hpp"
#include "gpcorrect/observation.hpp"
#include "gpcorrect/types.hpp"

namespace gpc {

/// z(y) = scale * cos(W y + b), scale = sqrt(2 sf2 / D), rows of W ~ N(0, I / sigma_k^2),
/// b ~ U[0, 2 pi).  <z(y1), z(y2)> is an unbiased estimate of the RBF kernel.
///
/// Draw order from Rng(seed): W row by row, then b.
struct FeatureMap {
  std::size_t features = 0;
  int input_dim = 0;
  Matrix w;
  Eigen::VectorXd b;
  double scale = 0.0;
  std::uint64_t seed = 0;
  KernelConfig kernel;
};

FeatureMap sample_features(const KernelConfig& kernel, int input_dim, std::size_t features,
                           std::uint64_t seed);

Eigen::VectorXd featurize(const FeatureMap& map, const State& y);
/// |states| x D, row-parallel.
Matrix feature_matrix(const FeatureMap& map, const StateList& states);

struct RffModel {
  FeatureMap features;
  Matrix theta_hat;  // D x p
  double ridge = 0.0;

  int output_dim() const { return static_cast<int>(theta_hat.cols()); }
};

enum class RidgeForm { automatic, primal, dual };

/// Solve (Z^T Z + ridge I) Theta = Z^T F.  `automatic` uses the D x D primal
/// system when there are more samples than features and the K~ x K~ dual
/// system otherwise.  ridge defaults to the mean noise variance.
RffModel fit_ridge(const ObservationSet& observations, const FeatureMap& map,
                   std::optional<double> ridge = std::nullopt,
                   RidgeForm form = RidgeForm::automatic);

/// Theta^T z(y).
State emulate_query(const RffModel& model, const State& y);

/// RK4 on dy/dt = G(y) + emulate_query(model, y).
Trajectory emulate_trajectory(const SystemSpec& system, const RffModel& model, const State& y0,
                              const TimeGrid& grid, int substeps = kDefaultSubsteps);

/// FNV-1a over the shortest round-trip decimal form of W's first row; guards
/// against drift when a model is regenerated from its seed.
std::uint64_t feature_checksum(const FeatureMap& map);

namespace serial {
Matrix feature_matrix(const FeatureMap& map, const StateList& states);
}  // namespace serial

}  // namespace gpc
