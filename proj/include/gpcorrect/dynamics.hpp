#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gpcorrect/types.hpp"

namespace gpc {

/// Axis-aligned box in R^d.
struct Box {
  State lower;
  State upper;

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const State& y, double tol = 0.0) const;
  double volume() const;
  /// Throws ArgumentError unless upper > lower along every axis.
  void validate() const;
};

/// dy/dt = G(y) + F(y) with G known and F optionally available
/// (simulation ground truth only).
struct SystemSpec {
  int dim = 0;
  VectorField known_term;
  std::optional<VectorField> true_correction;
  Box domain;

  void validate() const;
  SystemSpec without_correction() const;
};

/// Strictly increasing sample times t_1 < ... < t_T, T >= 2, t_1 >= 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// `count` equally spaced points on [t0, t1], endpoints included.
  static TimeGrid uniform(double t0, double t1, std::size_t count);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

 private:
  std::vector<double> points_;
};

enum class ModelTag { true_model, proxy_model, emulated_model };

struct Trajectory {
  State initial_condition;
  TimeGrid grid;
  StateList states;
  ModelTag tag = ModelTag::true_model;
};

inline constexpr int kDefaultSubsteps = 100;

/// Classical RK4 for dy/dt = field(y) starting from y(0) = y0 and sampled at
/// the grid points.  Each grid interval (and the lead-in [0, t_1] when
/// t_1 > 0) is covered by `substeps` equal steps.
Trajectory integrate_field(const VectorField& field, int dim, const State& y0,
                           const TimeGrid& grid, int substeps, ModelTag tag);

/// Integrates G + F (use_correction) or G alone.
Trajectory integrate_rk4(const SystemSpec& system, bool use_correction,
                         const State& y0, const TimeGrid& grid,
                         int substeps = kDefaultSubsteps);

/// e^{At} y0.
State linear_flow(const Matrix& a, const State& y0, double t);

/// G-only trajectories from every seed, in seed order.  The sampled states
/// of all trajectories form the proxy set of future states.
std::vector<Trajectory> proxy_states(const SystemSpec& system,
                                     const StateList& seeds,
                                     const TimeGrid& grid,
                                     int substeps = kDefaultSubsteps);

/// G + F trajectories from every seed (simulation mode).
std::vector<Trajectory> true_states(const SystemSpec& system,
                                    const StateList& seeds,
                                    const TimeGrid& grid,
                                    int substeps = kDefaultSubsteps);

/// Concatenate the sampled states of all trajectories.
StateList flatten_states(const std::vector<Trajectory>& trajectories);

namespace serial {
std::vector<Trajectory> proxy_states(const SystemSpec& system,
                                     const StateList& seeds,
                                     const TimeGrid& grid,
                                     int substeps = kDefaultSubsteps);
}  // namespace serial

}  // namespace gpc
