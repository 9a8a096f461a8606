#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpcorrect/design.hpp"
#include "gpcorrect/dynamics.hpp"
#include "gpcorrect/kernels.hpp"

namespace gpc {

enum class ScenarioKind { linear_quadratic, gravity };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

struct PointMass {
  double mass = 0.0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Every constant of a desk-scale experiment.  Fields that do not apply to
/// the chosen scenario are ignored (and rejected when parsing JSON).
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::linear_quadratic;

  // linear_quadratic: G(y) = A y, F(y) = c .* y.^2 on a box domain.
  Matrix a;
  State correction_coefficients;
  Box domain;
  std::size_t grid_per_axis = 13;

  // gravity: unit mass in the field of point masses; G sees the known masses,
  // F adds the hidden ones.  Candidates sit on an annulus around the first
  // known mass with tangential speed sqrt(m / r) (1 + U[-jitter, jitter]).
  std::vector<PointMass> known_masses;
  std::vector<PointMass> hidden_masses;
  std::size_t candidate_count = 300;
  double radius_min = 0.5;
  double radius_max = 2.5;
  double speed_jitter = 0.2;
  double metric_margin = 0.1;  // relative growth of the candidate bounding box

  double t_start = 0.0;
  double t_end = 6.0;
  std::size_t samples = 11;
  int substeps = kDefaultSubsteps;
  double noise_variance = 1e-4;
  KernelConfig kernel;
  KernelConfig agnostic_kernel;

  std::size_t design_budget = 9;
  std::size_t random_budget = 40;
  std::vector<std::size_t> budgets;
  std::size_t realizations = 10;
  std::size_t test_seeds = 20;
  std::uint64_t seed = 2026;
  std::size_t metric_resolution = 101;
  std::size_t rff_features = 4096;
  std::optional<double> rff_ridge;
  std::string algorithm = "lazy";

  TimeGrid grid() const { return TimeGrid::uniform(t_start, t_end, samples); }
  void validate() const;
};

ScenarioConfig default_linear_quadratic_config();
ScenarioConfig default_gravity_config();

/// A scenario resolved into everything the pipeline needs.
struct Scenario {
  ScenarioConfig config;
  SystemSpec system;
  StateList candidates;
  /// Region (in kernel-input coordinates) over which field errors are integrated.
  Box metric_box;
  /// State coordinates the correction depends on, and the components it occupies.
  std::vector<int> kernel_inputs;
  std::vector<int> learned_outputs;

  int learned_dim() const { return static_cast<int>(learned_outputs.size()); }
  /// F restricted to the learned components as a function of the kernel inputs.
  State correction_slice(const State& x) const;
  /// G restricted the same way (only meaningful where G depends on the kernel inputs alone).
  State known_slice(const State& x) const;
  /// Embed a kernel-input point as a full state (other coordinates zero).
  State lift_input(const State& x) const;

  DesignProblem design_problem(std::size_t budget) const;
  NoiseModel system_noise(std::uint64_t seed) const;
};

Scenario build_scenario(const ScenarioConfig& config);

/// G(y) = A y, F(y) = (0.01 y_1^2, 0.01 y_2^2) on [-1, 1]^2.
std::pair<SystemSpec, ScenarioConfig> scenario_linear_quadratic();
/// Satellite in a 2D field: m1 = 0.2 at the origin known, m2 = 0.1 at (0, 4)
/// and m3 = 0.4 at (0.5, 3.8) hidden.  State (x1, x2, v1, v2).
std::pair<SystemSpec, ScenarioConfig> scenario_gravity();

/// Acceleration on a unit mass at `x` from the given point masses.
Eigen::Vector2d gravity_acceleration(const std::vector<PointMass>& masses, const Eigen::Vector2d& x);

}  // namespace gpc
