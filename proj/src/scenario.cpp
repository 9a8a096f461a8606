#include "gpcorrect/scenario.hpp"

#include <cmath>
#include <numbers>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/rng.hpp"

namespace gpc {

namespace {
constexpr std::uint64_t kCandidateStream = 0x63616e64ULL;  // "cand"
}

std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::linear_quadratic ? "linear_quadratic" : "gravity";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "linear_quadratic") return ScenarioKind::linear_quadratic;
  if (name == "gravity") return ScenarioKind::gravity;
  throw ArgumentError("unknown scenario '" + name + "'");
}

void ScenarioConfig::validate() const {
  kernel.validate();
  agnostic_kernel.validate();
  if (samples < 2) throw ArgumentError("scenario: samples must be >= 2");
  if (!(t_end > t_start) || t_start < 0.0) throw ArgumentError("scenario: invalid time span");
  if (substeps < 1) throw ArgumentError("scenario: substeps must be >= 1");
  if (!(noise_variance > 0.0)) throw ArgumentError("scenario: noise_variance must be positive");
  if (design_budget < 1) throw ArgumentError("scenario: design_budget must be >= 1");
  if (realizations < 1) throw ArgumentError("scenario: realizations must be >= 1");
  if (metric_resolution < 2) throw ArgumentError("scenario: metric_resolution must be >= 2");
  if (rff_features < 1) throw ArgumentError("scenario: rff_features must be >= 1");
  if (rff_ridge && !(*rff_ridge > 0.0)) throw ArgumentError("scenario: rff_ridge must be positive");
  if (algorithm != "greedy" && algorithm != "lazy") {
    throw ArgumentError("scenario: algorithm must be greedy or lazy");
  }
  for (auto k : budgets) {
    if (k < 1) throw ArgumentError("scenario: budgets must be >= 1");
  }
  if (scenario == ScenarioKind::linear_quadratic) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ArgumentError("scenario: A must be square");
    if (correction_coefficients.size() != a.rows()) {
      throw ArgumentError("scenario: correction_coefficients must match A");
    }
    domain.validate();
    if (domain.dim() != a.rows()) throw ArgumentError("scenario: domain dimension must match A");
    if (grid_per_axis < 2) throw ArgumentError("scenario: grid_per_axis must be >= 2");
  } else {
    if (known_masses.empty()) throw ArgumentError("scenario: gravity needs a known mass");
    if (!(radius_min > 0.0) || !(radius_max > radius_min)) {
      throw ArgumentError("scenario: need 0 < radius_min < radius_max");
    }
    if (candidate_count < 1) throw ArgumentError("scenario: candidate_count must be >= 1");
    if (!(speed_jitter >= 0.0) || speed_jitter >= 1.0) {
      throw ArgumentError("scenario: speed_jitter must be in [0, 1)");
    }
    if (!(metric_margin >= 0.0)) throw ArgumentError("scenario: metric_margin must be >= 0");
  }
}

ScenarioConfig default_linear_quadratic_config() {
  ScenarioConfig c;
  c.scenario = ScenarioKind::linear_quadratic;
  c.a.resize(2, 2);
  c.a << 0.02, 0.10, -0.10, -0.06;
  c.correction_coefficients = Eigen::Vector2d(0.01, 0.01);
  c.domain = Box{Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0)};
  c.grid_per_axis = 13;
  c.t_start = 0.0;
  c.t_end = 6.0;
  c.samples = 11;
  c.noise_variance = 1e-4;
  // Per-component mean of F_i^2 over [-1, 1]^2 is 1e-4 / 5 = 2e-5.
  c.kernel = KernelConfig::rbf(1.0, 2e-5);
  c.agnostic_kernel = KernelConfig::rbf(1.0, 1e-2);
  c.design_budget = 9;
  c.random_budget = 40;
  c.budgets = {3, 6, 9, 12};
  c.realizations = 10;
  c.test_seeds = 20;
  c.metric_resolution = 101;
  return c;
}

ScenarioConfig default_gravity_config() {
  ScenarioConfig c;
  c.scenario = ScenarioKind::gravity;
  c.known_masses = {{0.2, Eigen::Vector2d(0.0, 0.0)}};
  c.hidden_masses = {{0.1, Eigen::Vector2d(0.0, 4.0)}, {0.4, Eigen::Vector2d(0.5, 3.8)}};
  c.candidate_count = 300;
  c.radius_min = 0.5;
  c.radius_max = 2.5;
  c.speed_jitter = 0.2;
  c.metric_margin = 0.1;
  c.t_start = 0.0;
  c.t_end = 3.0;
  c.samples = 20;
  c.noise_variance = 1e-4;
  c.kernel = KernelConfig::rbf(1.0, 1e-3);
  c.agnostic_kernel = KernelConfig::rbf(1.0, 1e-2);
  c.design_budget = 7;
  c.random_budget = 7;
  c.budgets = {7};
  c.realizations = 10;
  c.test_seeds = 20;
  // Even so that no midpoint lands on the central mass.
  c.metric_resolution = 100;
  return c;
}

Eigen::Vector2d gravity_acceleration(const std::vector<PointMass>& masses, const Eigen::Vector2d& x) {
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (const auto& m : masses) {
    const Eigen::Vector2d r = x - m.position;
    const double n = r.norm();
    acc -= m.mass * r / (n * n * n);
  }
  return acc;
}

State Scenario::correction_slice(const State& x) const {
  const State full = (*system.true_correction)(lift_input(x));
  State out(learned_dim());
  for (int i = 0; i < learned_dim(); ++i) out(i) = full(learned_outputs[static_cast<std::size_t>(i)]);
  return out;
}

State Scenario::known_slice(const State& x) const {
  const State full = system.known_term(lift_input(x));
  State out(learned_dim());
  for (int i = 0; i < learned_dim(); ++i) out(i) = full(learned_outputs[static_cast<std::size_t>(i)]);
  return out;
}

State Scenario::lift_input(const State& x) const {
  State y = State::Zero(system.dim);
  for (std::size_t i = 0; i < kernel_inputs.size(); ++i) y(kernel_inputs[i]) = x(static_cast<Eigen::Index>(i));
  return y;
}

NoiseModel Scenario::system_noise(std::uint64_t seed) const {
  return NoiseModel::isotropic(system.dim, config.noise_variance, seed);
}

DesignProblem Scenario::design_problem(std::size_t budget) const {
  DesignProblem p;
  p.candidate_seeds = candidates;
  p.budget = budget;
  p.grid = config.grid();
  p.kernel = config.kernel;
  p.noise = NoiseModel::isotropic(learned_dim(), config.noise_variance);
  p.system = system.without_correction();
  p.substeps = config.substeps;
  p.kernel_inputs = kernel_inputs;
  if (static_cast<int>(kernel_inputs.size()) == system.dim) p.kernel_inputs.clear();
  return p;
}

namespace {

Scenario build_linear_quadratic(const ScenarioConfig& c) {
  Scenario s;
  s.config = c;
  const Matrix a = c.a;
  const State coef = c.correction_coefficients;
  const int d = static_cast<int>(a.rows());
  s.system.dim = d;
  s.system.known_term = [a](const State& y) -> State { return a * y; };
  s.system.true_correction = [coef](const State& y) -> State {
    return (coef.array() * y.array().square()).matrix();
  };
  s.system.domain = c.domain;
  s.system.validate();

  // Uniform tensor grid over the domain, first axis varying slowest.
  const std::size_t m = c.grid_per_axis;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  for (std::size_t idx = 0; idx < total; ++idx) {
    State p(d);
    std::size_t rest = idx;
    for (int axis = d - 1; axis >= 0; --axis) {
      const std::size_t k = rest % m;
      rest /= m;
      p(axis) = c.domain.lower(axis) +
                (c.domain.upper(axis) - c.domain.lower(axis)) * static_cast<double>(k) /
                    static_cast<double>(m - 1);
    }
    s.candidates.push_back(std::move(p));
  }
  s.metric_box = c.domain;
  for (int i = 0; i < d; ++i) {
    s.kernel_inputs.push_back(i);
    s.learned_outputs.push_back(i);
  }
  return s;
}

Scenario build_gravity(const ScenarioConfig& c) {
  Scenario s;
  s.config = c;
  const auto known = c.known_masses;
  const auto hidden = c.hidden_masses;
  s.system.dim = 4;
  s.system.known_term = [known](const State& y) -> State {
    const Eigen::Vector2d acc = gravity_acceleration(known, Eigen::Vector2d(y(0), y(1)));
    State out(4);
    out << y(2), y(3), acc(0), acc(1);
    return out;
  };
  s.system.true_correction = [hidden](const State& y) -> State {
    const Eigen::Vector2d acc = gravity_acceleration(hidden, Eigen::Vector2d(y(0), y(1)));
    State out(4);
    out << 0.0, 0.0, acc(0), acc(1);
    return out;
  };

  const PointMass& center = c.known_masses.front();
  Rng rng = Rng::stream(c.seed, kCandidateStream);
  for (std::size_t i = 0; i < c.candidate_count; ++i) {
    // Uniform in area: r^2 uniform between the squared radii.
    const double r = std::sqrt(rng.uniform(c.radius_min * c.radius_min, c.radius_max * c.radius_max));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double speed = std::sqrt(center.mass / r) * (1.0 + rng.uniform(-c.speed_jitter, c.speed_jitter));
    const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
    State y(4);
    y << center.position(0) + r * dir(0), center.position(1) + r * dir(1), -speed * dir(1),
        speed * dir(0);
    s.candidates.push_back(std::move(y));
  }

  // State domain: generous box around every candidate.
  State lo = s.candidates.front(), hi = s.candidates.front();
  for (const auto& y : s.candidates) {
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  const State pad = 0.1 * (hi - lo) + State::Constant(4, 1e-6);
  s.system.domain = Box{lo - pad, hi + pad};
  s.system.validate();

  Eigen::Vector2d plo(lo(0), lo(1)), phi(hi(0), hi(1));
  const Eigen::Vector2d grow = 0.5 * c.metric_margin * (phi - plo);
  s.metric_box = Box{plo - grow, phi + grow};
  s.kernel_inputs = {0, 1};
  s.learned_outputs = {2, 3};
  return s;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  return config.scenario == ScenarioKind::linear_quadratic ? build_linear_quadratic(config)
                                                           : build_gravity(config);
}

std::pair<SystemSpec, ScenarioConfig> scenario_linear_quadratic() {
  auto s = build_scenario(default_linear_quadratic_config());
  return {s.system, s.config};
}

std::pair<SystemSpec, ScenarioConfig> scenario_gravity() {
  auto s = build_scenario(default_gravity_config());
  return {s.system, s.config};
}

}  // namespace gpc
