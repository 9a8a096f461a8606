#include "gpcorrect/observation.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gpcorrect/errors.hpp"
#include "gpcorrect/parallel.hpp"
#include "gpcorrect/rng.hpp"

namespace gpc {

NoiseModel NoiseModel::isotropic(int dim, double variance, std::uint64_t seed) {
  NoiseModel m{variance * Matrix::Identity(dim, dim), seed};
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (covariance.rows() == 0 || covariance.rows() != covariance.cols()) {
    throw ArgumentError("NoiseModel: covariance must be square and non-empty");
  }
  if (!covariance.allFinite()) throw ArgumentError("NoiseModel: non-finite covariance");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ArgumentError("NoiseModel: covariance is not symmetric");
  }
  if (!(min_singular_value() > 0.0)) {
    throw ArgumentError("NoiseModel: covariance is not positive definite");
  }
}

bool NoiseModel::is_diagonal(double tol) const {
  Matrix off = covariance;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= tol;
}

bool NoiseModel::is_isotropic() const {
  if (!is_diagonal()) return false;
  const double v = covariance(0, 0);
  return (covariance.diagonal().array() == v).all();
}

double NoiseModel::min_singular_value() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(covariance, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

StateList ObservationSet::states() const {
  StateList out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.state);
  return out;
}

Matrix ObservationSet::values() const {
  Matrix out(static_cast<Eigen::Index>(samples.size()), output_dim());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = samples[j].value.transpose();
  }
  return out;
}

void ObservationSet::append(const ObservationSet& other) {
  if (!samples.empty() && !other.samples.empty() &&
      (other.input_dim() != input_dim() || other.output_dim() != output_dim())) {
    throw ArgumentError("ObservationSet::append: dimension mismatch");
  }
  if (samples.empty()) noise = other.noise;
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

ObservationSet sample_corrections(const SystemSpec& system,
                                  const std::vector<Trajectory>& trajectories,
                                  const NoiseModel& noise,
                                  const std::vector<std::size_t>& experiment_ids) {
  if (!system.true_correction) {
    throw ModeError("sample_corrections: system has no ground-truth correction");
  }
  noise.validate();
  if (noise.dim() != system.dim) throw ArgumentError("sample_corrections: noise dimension != system dim");
  if (!experiment_ids.empty() && experiment_ids.size() != trajectories.size()) {
    throw ArgumentError("sample_corrections: one experiment id per trajectory required");
  }
  for (const auto& t : trajectories) {
    if (t.tag != ModelTag::true_model) {
      throw ArgumentError("sample_corrections: trajectories must come from the true model");
    }
  }

  const Eigen::LLT<Matrix> chol(noise.covariance);
  const Matrix l = chol.matrixL();
  const VectorField& f = *system.true_correction;
  const int d = system.dim;

  std::vector<std::vector<CorrectionSample>> per(trajectories.size());
  parallel_for(trajectories.size(), [&](std::size_t k) {
    const std::size_t id = experiment_ids.empty() ? k : experiment_ids[k];
    Rng rng = Rng::stream(noise.seed, id);
    const auto& traj = trajectories[k];
    auto& out = per[k];
    out.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      State z(d);
      for (int c = 0; c < d; ++c) z(c) = rng.normal();
      out.push_back({traj.states[i], f(traj.states[i]) + l * z, id, i});
    }
  });

  ObservationSet set{{}, noise};
  for (auto& p : per) set.samples.insert(set.samples.end(), p.begin(), p.end());
  return set;
}

StateList estimate_derivatives(const Trajectory& trajectory) {
  const auto& t = trajectory.grid.points();
  const auto& y = trajectory.states;
  const std::size_t n = y.size();
  if (n < 3 || t.size() != n) {
    throw ArgumentError("estimate_derivatives: need at least 3 aligned samples");
  }
  // Derivative at x of the quadratic through (x0,y0),(x1,y1),(x2,y2).
  auto stencil = [&](std::size_t i0, std::size_t i1, std::size_t i2, double x) {
    const double x0 = t[i0], x1 = t[i1], x2 = t[i2];
    const double w0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    const double w1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    const double w2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    return State(w0 * y[i0] + w1 * y[i1] + w2 * y[i2]);
  };
  StateList out(n);
  out[0] = stencil(0, 1, 2, t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = stencil(i - 1, i, i + 1, t[i]);
  out[n - 1] = stencil(n - 3, n - 2, n - 1, t[n - 1]);
  return out;
}

ObservationSet corrections_from_derivatives(const SystemSpec& system,
                                            const Trajectory& trajectory,
                                            const StateList& derivatives,
                                            const NoiseModel& assumed_noise,
                                            std::size_t experiment) {
  if (derivatives.size() != trajectory.states.size()) {
    throw ArgumentError("corrections_from_derivatives: derivative count != state count");
  }
  ObservationSet set{{}, assumed_noise};
  set.samples.reserve(derivatives.size());
  for (std::size_t i = 0; i < derivatives.size(); ++i) {
    const State& y = trajectory.states[i];
    if (derivatives[i].size() != system.dim || y.size() != system.dim) {
      throw ArgumentError("corrections_from_derivatives: dimension mismatch");
    }
    set.samples.push_back({y, derivatives[i] - system.known_term(y), experiment, i});
  }
  return set;
}

ObservationSet project(const ObservationSet& set, const std::vector<int>& inputs,
                       const std::vector<int>& outputs) {
  const int din = set.input_dim();
  const int dout = set.noise.dim();
  for (int i : inputs) {
    if (i < 0 || i >= din) throw ArgumentError("project: input index out of range");
  }
  for (int o : outputs) {
    if (o < 0 || o >= dout) throw ArgumentError("project: output index out of range");
  }
  ObservationSet out;
  out.noise.seed = set.noise.seed;
  out.noise.covariance.resize(static_cast<Eigen::Index>(outputs.size()),
                              static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t a = 0; a < outputs.size(); ++a) {
    for (std::size_t b = 0; b < outputs.size(); ++b) {
      out.noise.covariance(a, b) = set.noise.covariance(outputs[a], outputs[b]);
    }
  }
  out.samples.reserve(set.samples.size());
  for (const auto& s : set.samples) {
    CorrectionSample p{State(inputs.size()), State(outputs.size()), s.source_experiment,
                       s.source_time_index};
    for (std::size_t a = 0; a < inputs.size(); ++a) p.state(a) = s.state(inputs[a]);
    for (std::size_t a = 0; a < outputs.size(); ++a) p.value(a) = s.value(outputs[a]);
    out.samples.push_back(std::move(p));
  }
  return out;
}

void write_csv(std::ostream& os, const ObservationSet& set) {
  const int d = set.input_dim();
  const int p = set.output_dim();
  os << "k,i";
  for (int c = 1; c <= d; ++c) os << ",y_" << c;
  for (int c = 1; c <= p; ++c) os << ",f_" << c;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& s : set.samples) {
    os << s.source_experiment << ',' << s.source_time_index;
    for (int c = 0; c < d; ++c) os << ',' << s.state(c);
    for (int c = 0; c < p; ++c) os << ',' << s.value(c);
    os << '\n';
  }
}

}  // namespace gpc
