#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/types.hpp"

namespace gpc {

/// Additive derivative noise eps ~ N(0, covariance), drawn from `seed`.
struct NoiseModel {
  Matrix covariance;
  std::uint64_t seed = 0;

  static NoiseModel isotropic(int dim, double variance, std::uint64_t seed = 0);

  int dim() const { return static_cast<int>(covariance.rows()); }
  /// Symmetric within 1e-12 and strictly positive definite.
  void validate() const;
  bool is_diagonal(double tol = 0.0) const;
  /// True when covariance == variance * I exactly.
  bool is_isotropic() const;
  /// Smallest singular value (== smallest eigenvalue for SPD).
  double min_singular_value() const;
};

struct CorrectionSample {
  State state;
  State value;
  std::size_t source_experiment = 0;
  std::size_t source_time_index = 0;
};

struct ObservationSet {
  std::vector<CorrectionSample> samples;
  NoiseModel noise;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  int input_dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].state.size()); }
  int output_dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].value.size()); }

  StateList states() const;
  /// size() x output_dim() matrix of values.
  Matrix values() const;

  void append(const ObservationSet& other);
};

/// Simulation mode: for every sampled state y of every trajectory emit
/// F(y) + eps.  Trajectory k draws its noise from the stream
/// derive_seed(noise.seed, experiment_ids[k]) (experiment_ids defaults to 0..K-1),
/// so the result does not depend on scheduling.
ObservationSet sample_corrections(const SystemSpec& system,
                                  const std::vector<Trajectory>& trajectories,
                                  const NoiseModel& noise,
                                  const std::vector<std::size_t>& experiment_ids = {});

/// d/dt y at every grid point from three-point Lagrange stencils: centered
/// in the interior, one-sided second order at both ends.  Exact for
/// quadratics on any grid.
StateList estimate_derivatives(const Trajectory& trajectory);

/// value_i = derivative_i - G(y(t_i)).  No noise is added; `assumed_noise`
/// is recorded on the result for downstream fitting.
ObservationSet corrections_from_derivatives(const SystemSpec& system,
                                            const Trajectory& trajectory,
                                            const StateList& derivatives,
                                            const NoiseModel& assumed_noise,
                                            std::size_t experiment = 0);

/// Restrict samples to a subset of input coordinates and output components;
/// the noise covariance is restricted to the chosen outputs.
ObservationSet project(const ObservationSet& set, const std::vector<int>& inputs,
                       const std::vector<int>& outputs);

/// Columns k, i, y_1..y_d, f_1..f_p with a header row.
void write_csv(std::ostream& os, const ObservationSet& set);

}  // namespace gpc
