#include "gpcorrect/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/linalg.hpp"
#include "gpcorrect/log.hpp"
#include "gpcorrect/parallel.hpp"

namespace gpc {

bool Box::contains(const State& y, double tol) const {
  if (y.size() != lower.size()) return false;
  return ((y.array() >= lower.array() - tol) && (y.array() <= upper.array() + tol)).all();
}

double Box::volume() const { return (upper - lower).prod(); }

void Box::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ArgumentError("Box: lower/upper size mismatch or empty");
  }
  if (!((upper - lower).array() > 0.0).all()) {
    throw ArgumentError("Box: extent must be strictly positive on every axis");
  }
}

void SystemSpec::validate() const {
  if (dim <= 0) throw ArgumentError("SystemSpec: dim must be positive");
  if (!known_term) throw ArgumentError("SystemSpec: known_term is empty");
  if (true_correction && !*true_correction) {
    throw ArgumentError("SystemSpec: true_correction is set but empty");
  }
  domain.validate();
  if (domain.dim() != dim) throw ArgumentError("SystemSpec: domain dimension != dim");
}

SystemSpec SystemSpec::without_correction() const {
  SystemSpec copy = *this;
  copy.true_correction.reset();
  return copy;
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ArgumentError("TimeGrid: need at least 2 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw ArgumentError("TimeGrid: non-finite time");
    if (i == 0 && points_[i] < 0.0) throw ArgumentError("TimeGrid: times must be nonnegative");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw ArgumentError("TimeGrid: times must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t count) {
  if (count < 2) throw ArgumentError("TimeGrid::uniform: need at least 2 points");
  std::vector<double> pts(count);
  const double h = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = t0 + h * static_cast<double>(i);
  pts.back() = t1;
  return TimeGrid(std::move(pts));
}

namespace {

State eval_field(const VectorField& field, const State& y, int dim) {
  State out = field(y);
  if (out.size() != dim) {
    throw ArgumentError("vector field returned a vector of length " +
                        std::to_string(out.size()) + ", expected " +
                        std::to_string(dim));
  }
  return out;
}

void advance(const VectorField& field, int dim, State& y, double t0, double t1,
             int substeps) {
  const double h = (t1 - t0) / substeps;
  for (int s = 0; s < substeps; ++s) {
    const State k1 = eval_field(field, y, dim);
    const State k2 = eval_field(field, y + 0.5 * h * k1, dim);
    const State k3 = eval_field(field, y + 0.5 * h * k2, dim);
    const State k4 = eval_field(field, y + h * k3, dim);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      const double t = t0 + h * (s + 1);
      std::ostringstream msg;
      msg << "integration diverged: non-finite state at t = " << t;
      throw IntegrationError(msg.str(), t);
    }
  }
}

}  // namespace

Trajectory integrate_field(const VectorField& field, int dim, const State& y0,
                           const TimeGrid& grid, int substeps, ModelTag tag) {
  if (y0.size() != dim) throw ArgumentError("integrate: initial state has wrong dimension");
  if (substeps < 1) throw ArgumentError("integrate: substeps must be >= 1");
  if (!y0.allFinite()) throw ArgumentError("integrate: initial state is not finite");

  Trajectory traj{y0, grid, {}, tag};
  traj.states.reserve(grid.size());
  State y = y0;
  double t = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > t) advance(field, dim, y, t, grid[i], substeps);
    t = grid[i];
    traj.states.push_back(y);
  }
  return traj;
}

Trajectory integrate_rk4(const SystemSpec& system, bool use_correction,
                         const State& y0, const TimeGrid& grid, int substeps) {
  if (y0.size() != system.dim) throw ArgumentError("integrate_rk4: y0 has wrong dimension");
  if (!use_correction) {
    return integrate_field(system.known_term, system.dim, y0, grid, substeps,
                           ModelTag::proxy_model);
  }
  if (!system.true_correction) {
    throw ModeError("integrate_rk4: use_correction requires true_correction");
  }
  const VectorField& g = system.known_term;
  const VectorField& f = *system.true_correction;
  VectorField full = [&g, &f](const State& y) -> State { return g(y) + f(y); };
  return integrate_field(full, system.dim, y0, grid, substeps, ModelTag::true_model);
}

State linear_flow(const Matrix& a, const State& y0, double t) {
  if (a.rows() != a.cols()) throw ArgumentError("linear_flow: A must be square");
  if (y0.size() != a.rows()) throw ArgumentError("linear_flow: y0 has wrong dimension");
  if (!a.allFinite()) throw ArgumentError("linear_flow: A has non-finite entries");
  if (!std::isfinite(t)) throw ArgumentError("linear_flow: t must be finite");
  return matrix_exponential(a * t) * y0;
}

namespace {

template <class Loop>
std::vector<Trajectory> batch(const SystemSpec& system, const StateList& seeds,
                              const TimeGrid& grid, int substeps,
                              bool use_correction, Loop&& loop) {
  for (const auto& s : seeds) {
    if (s.size() != system.dim) throw ArgumentError("seed has wrong dimension");
  }
  std::vector<Trajectory> out(seeds.size(), Trajectory{State(), grid, {}, ModelTag::proxy_model});
  loop(seeds.size(), [&](std::size_t k) {
    out[k] = integrate_rk4(system, use_correction, seeds[k], grid, substeps);
  });
  std::size_t exits = 0;
  for (const auto& traj : out) {
    for (const auto& y : traj.states) {
      if (!system.domain.contains(y, 1e-12)) {
        ++exits;
        break;
      }
    }
  }
  if (exits > 0) {
    log::warn(std::to_string(exits) + " of " + std::to_string(seeds.size()) +
              " trajectories leave the domain box");
  }
  return out;
}

void check_seeds_inside(const SystemSpec& system, const StateList& seeds) {
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (seeds[k].size() == system.dim && !system.domain.contains(seeds[k], 1e-12)) {
      throw ArgumentError("seed " + std::to_string(k) + " lies outside the domain box");
    }
  }
}

}  // namespace

std::vector<Trajectory> proxy_states(const SystemSpec& system, const StateList& seeds,
                                     const TimeGrid& grid, int substeps) {
  check_seeds_inside(system, seeds);
  return batch(system, seeds, grid, substeps, false,
               [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

std::vector<Trajectory> true_states(const SystemSpec& system, const StateList& seeds,
                                    const TimeGrid& grid, int substeps) {
  return batch(system, seeds, grid, substeps, true,
               [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

namespace serial {
std::vector<Trajectory> proxy_states(const SystemSpec& system, const StateList& seeds,
                                     const TimeGrid& grid, int substeps) {
  check_seeds_inside(system, seeds);
  return batch(system, seeds, grid, substeps, false,
               [](std::size_t n, auto&& body) { serial_for(n, body); });
}
}  // namespace serial

StateList flatten_states(const std::vector<Trajectory>& trajectories) {
  StateList out;
  for (const auto& t : trajectories) out.insert(out.end(), t.states.begin(), t.states.end());
  return out;
}

}  // namespace gpc
