#include "gpcorrect/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace gpc::io {

namespace {

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json mat_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_json(m.row(r).transpose()));
  return out;
}

Json states_json(const StateList& states) {
  Json out = Json::array();
  for (const auto& s : states) out.push_back(vec_json(s));
  return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

Eigen::VectorXd vec_from(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix mat_from(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  Matrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = vec_from(j[r], path + "[" + std::to_string(r) + "]");
    if (r == 0) m.resize(static_cast<Eigen::Index>(j.size()), row.size());
    if (row.size() != m.cols()) fail(path + "[" + std::to_string(r) + "]", "ragged matrix row");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

StateList states_from(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of states");
  StateList out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec_from(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// Object reader that remembers which keys were consumed.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json& at(const std::string& key) {
    if (!j_.contains(key)) fail(path(key), "missing required key");
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T need(const std::string& key) {
    at(key);
    return as<T>(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
    }
  }

 private:
  template <typename T>
  T as(const std::string& key) {
    seen_.insert(key);
    const Json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(path(key), "expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(path(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            fail(path(key), "expected a nonnegative integer");
          }
        }
      }
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(path(key), e.what());
    }
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json masses_json(const std::vector<PointMass>& masses) {
  Json out = Json::array();
  for (const auto& m : masses) out.push_back({{"mass", m.mass}, {"position", {m.position.x(), m.position.y()}}});
  return out;
}

std::vector<PointMass> masses_from(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of masses");
  std::vector<PointMass> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    Reader r(j[i], p);
    PointMass m;
    m.mass = r.need<double>("mass");
    const auto pos = vec_from(r.at("position"), r.path("position"));
    if (pos.size() != 2) fail(r.path("position"), "expected two coordinates");
    m.position = pos;
    r.finish();
    out.push_back(m);
  }
  return out;
}

}  // namespace

Json to_json(const KernelConfig& kernel) {
  Json j;
  j["family"] = to_string(kernel.family);
  if (kernel.family == KernelFamily::gaussian_rbf) {
    j["bandwidth"] = kernel.bandwidth;
  } else {
    j["order"] = kernel.order;
  }
  j["signal_variance"] = kernel.signal_variance;
  return j;
}

KernelConfig kernel_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  KernelConfig k;
  try {
    k.family = kernel_family_from_string(r.need<std::string>("family"));
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    fail(r.path("family"), e.what());
  }
  if (k.family == KernelFamily::gaussian_rbf) {
    k.bandwidth = r.need<double>("bandwidth");
  } else {
    k.bandwidth = 0.0;
    k.order = r.need<int>("order");
  }
  k.signal_variance = r.get<double>("signal_variance", 1.0);
  r.finish();
  try {
    k.validate();
  } catch (const ArgumentError& e) {
    fail(path, e.what());
  }
  return k;
}

Json to_json(const NoiseModel& noise) {
  return {{"covariance", mat_json(noise.covariance)}, {"seed", noise.seed}};
}

NoiseModel noise_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  NoiseModel n;
  n.covariance = mat_from(r.at("covariance"), r.path("covariance"));
  n.seed = r.get<std::uint64_t>("seed", 0);
  r.finish();
  try {
    n.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return n;
}

Json to_json(const ObservationSet& set) {
  Json samples = Json::array();
  for (const auto& s : set.samples) {
    samples.push_back({{"k", s.source_experiment},
                       {"i", s.source_time_index},
                       {"state", vec_json(s.state)},
                       {"value", vec_json(s.value)}});
  }
  return {{"kind", "observations"}, {"noise", to_json(set.noise)}, {"samples", samples}};
}

ObservationSet observations_from_json(const Json& j) {
  Reader r(j, "");
  if (r.need<std::string>("kind") != "observations") fail("kind", "expected 'observations'");
  ObservationSet set;
  set.noise = noise_from_json(r.at("noise"), "noise");
  const Json& samples = r.at("samples");
  if (!samples.is_array()) fail("samples", "expected an array");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Reader s(samples[i], "samples[" + std::to_string(i) + "]");
    CorrectionSample c;
    c.source_experiment = s.need<std::size_t>("k");
    c.source_time_index = s.need<std::size_t>("i");
    c.state = vec_from(s.at("state"), s.path("state"));
    c.value = vec_from(s.at("value"), s.path("value"));
    s.finish();
    set.samples.push_back(std::move(c));
  }
  r.finish();
  return set;
}

Json to_json(const GpPosterior& gp) {
  return {{"kind", "gp_posterior"},
          {"kernel", to_json(gp.kernel())},
          {"noise", to_json(gp.noise())},
          {"states", states_json(gp.training_states())},
          {"weights", mat_json(gp.weights())},
          {"jitter", gp.jitter_used()}};
}

GpPosterior posterior_from_json(const Json& j) {
  Reader r(j, "");
  if (r.need<std::string>("kind") != "gp_posterior") fail("kind", "expected 'gp_posterior'");
  const KernelConfig kernel = kernel_from_json(r.at("kernel"), "kernel");
  const NoiseModel noise = noise_from_json(r.at("noise"), "noise");
  StateList states = states_from(r.at("states"), "states");
  Matrix weights = mat_from(r.at("weights"), "weights");
  r.get<double>("jitter", 0.0);
  r.finish();
  return GpPosterior::restore(std::move(states), kernel, noise, std::move(weights));
}

Json to_json(const DesignResult& result) {
  Json gains = Json::array();
  for (double g : result.gains) gains.push_back(g);
  return {{"kind", "design"},
          {"selected_indices", result.selected_indices},
          {"selected", states_json(result.selected)},
          {"gains", gains},
          {"objective", result.objective},
          {"evaluations", result.evaluations}};
}

Json to_json(const RffModel& model) {
  return {{"kind", "rff_model"},
          {"kernel", to_json(model.features.kernel)},
          {"seed", model.features.seed},
          {"features", model.features.features},
          {"input_dim", model.features.input_dim},
          {"ridge", model.ridge},
          {"theta_hat", mat_json(model.theta_hat)},
          {"checksum", hex64(feature_checksum(model.features))}};
}

RffModel rff_from_json(const Json& j) {
  Reader r(j, "");
  if (r.need<std::string>("kind") != "rff_model") fail("kind", "expected 'rff_model'");
  const KernelConfig kernel = kernel_from_json(r.at("kernel"), "kernel");
  const auto seed = r.need<std::uint64_t>("seed");
  const auto features = r.need<std::size_t>("features");
  const auto input_dim = r.need<int>("input_dim");
  RffModel model;
  model.ridge = r.need<double>("ridge");
  model.theta_hat = mat_from(r.at("theta_hat"), "theta_hat");
  const auto checksum = r.need<std::string>("checksum");
  r.finish();
  model.features = sample_features(kernel, input_dim, features, seed);
  if (hex64(feature_checksum(model.features)) != checksum) {
    throw NumericalError("rff model: regenerated features do not match the stored checksum");
  }
  if (model.theta_hat.rows() != static_cast<Eigen::Index>(features)) {
    fail("theta_hat", "row count differs from the feature count");
  }
  return model;
}

Json to_json(const BenchReport& report) {
  Json methods = Json::array();
  for (auto m : report.methods) methods.push_back(to_string(m));
  Json summaries = Json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"method", to_string(s.method)},
                         {"budget", s.budget},
                         {"mean", s.mean},
                         {"stddev", s.stddev},
                         {"min", s.min},
                         {"max", s.max}});
  }
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"realization", row.realization},
                    {"method", to_string(row.method)},
                    {"budget", row.budget},
                    {"seed", row.seed},
                    {"error", row.error},
                    {"seeds", row.seeds}});
  }
  return {{"kind", "benchmark"},
          {"scenario", to_string(report.scenario)},
          {"master_seed", report.master_seed},
          {"realizations", report.realizations},
          {"budgets", report.budgets},
          {"methods", methods},
          {"design_order", report.design_order},
          {"correction_energy", report.correction_energy},
          {"full_energy", report.full_energy},
          {"summaries", summaries},
          {"rows", rows}};
}

Json to_json(const BoundValidationReport& report) {
  Json trials = Json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"delta_hat", t.delta_hat},
                      {"difference", t.difference},
                      {"bound", t.vacuous ? Json("inf") : Json(t.bound)},
                      {"ratio", t.ratio},
                      {"vacuous", t.vacuous},
                      {"within", t.within}});
  }
  return {{"kind", "bound_validation"},
          {"k_tilde", report.k_tilde},
          {"output_dim", report.output_dim},
          {"all_within", report.all_within},
          {"max_ratio", report.max_ratio},
          {"vacuous_trials", report.vacuous_trials},
          {"trials", trials}};
}

Json to_json(const TrajectoryStudy& study) {
  return {{"kind", "trajectory_study"},
          {"train_count", study.train_count},
          {"proxy_errors", study.proxy_errors},
          {"gp_errors", study.gp_errors},
          {"rff_errors", study.rff_errors},
          {"gp_improved_fraction", study.gp_improved_fraction},
          {"rff_improved_fraction", study.rff_improved_fraction},
          {"rff_gp_endpoint_gap", study.rff_gp_endpoint_gap}};
}

Json to_json(const ScenarioConfig& c) {
  Json j;
  j["scenario"] = to_string(c.scenario);
  if (c.scenario == ScenarioKind::linear_quadratic) {
    j["a"] = mat_json(c.a);
    j["correction_coefficients"] = vec_json(c.correction_coefficients);
    j["domain"] = {{"lower", vec_json(c.domain.lower)}, {"upper", vec_json(c.domain.upper)}};
    j["grid_per_axis"] = c.grid_per_axis;
  } else {
    j["known_masses"] = masses_json(c.known_masses);
    j["hidden_masses"] = masses_json(c.hidden_masses);
    j["candidate_count"] = c.candidate_count;
    j["radius_min"] = c.radius_min;
    j["radius_max"] = c.radius_max;
    j["speed_jitter"] = c.speed_jitter;
    j["metric_margin"] = c.metric_margin;
  }
  j["t_start"] = c.t_start;
  j["t_end"] = c.t_end;
  j["samples"] = c.samples;
  j["substeps"] = c.substeps;
  j["noise_variance"] = c.noise_variance;
  j["kernel"] = to_json(c.kernel);
  j["agnostic_kernel"] = to_json(c.agnostic_kernel);
  j["design_budget"] = c.design_budget;
  j["random_budget"] = c.random_budget;
  j["budgets"] = c.budgets;
  j["realizations"] = c.realizations;
  j["test_seeds"] = c.test_seeds;
  j["seed"] = c.seed;
  j["metric_resolution"] = c.metric_resolution;
  j["rff_features"] = c.rff_features;
  j["rff_ridge"] = c.rff_ridge ? Json(*c.rff_ridge) : Json(nullptr);
  j["algorithm"] = c.algorithm;
  return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
  Reader r(j, "");
  ScenarioKind kind;
  try {
    kind = scenario_kind_from_string(r.need<std::string>("scenario"));
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    fail("scenario", e.what());
  }
  ScenarioConfig c = kind == ScenarioKind::linear_quadratic ? default_linear_quadratic_config()
                                                            : default_gravity_config();
  if (kind == ScenarioKind::linear_quadratic) {
    if (r.has("a")) c.a = mat_from(r.at("a"), "a");
    if (r.has("correction_coefficients")) {
      c.correction_coefficients = vec_from(r.at("correction_coefficients"), "correction_coefficients");
    }
    if (r.has("domain")) {
      Reader d(r.at("domain"), "domain");
      c.domain.lower = vec_from(d.at("lower"), "domain.lower");
      c.domain.upper = vec_from(d.at("upper"), "domain.upper");
      d.finish();
    }
    c.grid_per_axis = r.get<std::size_t>("grid_per_axis", c.grid_per_axis);
  } else {
    if (r.has("known_masses")) c.known_masses = masses_from(r.at("known_masses"), "known_masses");
    if (r.has("hidden_masses")) c.hidden_masses = masses_from(r.at("hidden_masses"), "hidden_masses");
    c.candidate_count = r.get<std::size_t>("candidate_count", c.candidate_count);
    c.radius_min = r.get<double>("radius_min", c.radius_min);
    c.radius_max = r.get<double>("radius_max", c.radius_max);
    c.speed_jitter = r.get<double>("speed_jitter", c.speed_jitter);
    c.metric_margin = r.get<double>("metric_margin", c.metric_margin);
  }
  c.t_start = r.get<double>("t_start", c.t_start);
  c.t_end = r.get<double>("t_end", c.t_end);
  c.samples = r.get<std::size_t>("samples", c.samples);
  c.substeps = r.get<int>("substeps", c.substeps);
  c.noise_variance = r.get<double>("noise_variance", c.noise_variance);
  if (r.has("kernel")) c.kernel = kernel_from_json(r.at("kernel"), "kernel");
  if (r.has("agnostic_kernel")) c.agnostic_kernel = kernel_from_json(r.at("agnostic_kernel"), "agnostic_kernel");
  c.design_budget = r.get<std::size_t>("design_budget", c.design_budget);
  c.random_budget = r.get<std::size_t>("random_budget", c.random_budget);
  c.budgets = r.get<std::vector<std::size_t>>("budgets", c.budgets);
  c.realizations = r.get<std::size_t>("realizations", c.realizations);
  c.test_seeds = r.get<std::size_t>("test_seeds", c.test_seeds);
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.metric_resolution = r.get<std::size_t>("metric_resolution", c.metric_resolution);
  c.rff_features = r.get<std::size_t>("rff_features", c.rff_features);
  if (r.has("rff_ridge")) {
    const Json& v = r.at("rff_ridge");
    if (v.is_null()) {
      c.rff_ridge.reset();
    } else if (v.is_number()) {
      c.rff_ridge = v.get<double>();
    } else {
      fail("rff_ridge", "expected a number or null");
    }
  }
  c.algorithm = r.get<std::string>("algorithm", c.algorithm);
  r.finish();
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  return c;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  try {
    return scenario_from_json(read_json(path));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

void write_report_csv(std::ostream& os, const BenchReport& report) {
  const auto old = os.precision(17);
  os << "realization,method,budget,seed,error,seeds\n";
  for (const auto& row : report.rows) {
    os << row.realization << ',' << to_string(row.method) << ',' << row.budget << ',' << row.seed << ','
       << row.error << ',';
    for (std::size_t i = 0; i < row.seeds.size(); ++i) os << (i ? " " : "") << row.seeds[i];
    os << '\n';
  }
  os.precision(old);
}

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories) {
  const auto old = os.precision(17);
  const int d = trajectories.empty() ? 0 : static_cast<int>(trajectories.front().initial_condition.size());
  os << "trajectory,i,t";
  for (int c = 1; c <= d; ++c) os << ",y_" << c;
  os << '\n';
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& tr = trajectories[k];
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      os << k << ',' << i << ',' << tr.grid[i];
      for (Eigen::Index c = 0; c < tr.states[i].size(); ++c) os << ',' << tr.states[i](c);
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace gpc::io
