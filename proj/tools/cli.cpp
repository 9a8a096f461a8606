#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include "gpcorrect/bench.hpp"
#include "gpcorrect/design.hpp"
#include "gpcorrect/errors.hpp"
#include "gpcorrect/gp.hpp"
#include "gpcorrect/io.hpp"
#include "gpcorrect/log.hpp"
#include "gpcorrect/parallel.hpp"
#include "gpcorrect/rff.hpp"
#include "gpcorrect/rng.hpp"
#include "gpcorrect/scenario.hpp"

namespace gpc::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr std::uint64_t kEmulateStream = 0x656d756cULL;  // "emul"
constexpr std::uint64_t kFeatureStream = 0x72666600ULL;

struct Options {
  std::string subcommand;
  std::string scenario;
  std::string output = ".";
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
  std::optional<std::size_t> features;
  std::optional<std::size_t> realizations;
  std::size_t groups = 2;
  double perturbation = 0.01;
  std::size_t trials = 50;
  std::vector<std::string> methods;
  std::string manifest;
  int threads = 0;
  int verbosity = 0;
};

Json overrides_json(const Options& o) {
  Json j = Json::object();
  if (o.budget) j["budget"] = *o.budget;
  if (o.seed) j["seed"] = *o.seed;
  if (o.algorithm) j["algorithm"] = *o.algorithm;
  if (o.features) j["features"] = *o.features;
  if (o.realizations) j["realizations"] = *o.realizations;
  if (o.subcommand == "design") j["groups"] = o.groups;
  if (o.subcommand == "validate-bounds") {
    j["perturbation"] = o.perturbation;
    j["trials"] = o.trials;
  }
  if (o.subcommand == "benchmark" && !o.methods.empty()) j["methods"] = o.methods;
  return j;
}

void apply_overrides(const Json& j, Options& o) {
  if (j.contains("budget")) o.budget = j["budget"].get<std::size_t>();
  if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("algorithm")) o.algorithm = j["algorithm"].get<std::string>();
  if (j.contains("features")) o.features = j["features"].get<std::size_t>();
  if (j.contains("realizations")) o.realizations = j["realizations"].get<std::size_t>();
  if (j.contains("groups")) o.groups = j["groups"].get<std::size_t>();
  if (j.contains("perturbation")) o.perturbation = j["perturbation"].get<double>();
  if (j.contains("trials")) o.trials = j["trials"].get<std::size_t>();
  if (j.contains("methods")) o.methods = j["methods"].get<std::vector<std::string>>();
}

ScenarioConfig resolve_config(const Options& o) {
  ScenarioConfig c;
  if (o.scenario == "linear_quadratic" && !fs::exists(o.scenario)) {
    c = default_linear_quadratic_config();
  } else if (o.scenario == "gravity" && !fs::exists(o.scenario)) {
    c = default_gravity_config();
  } else {
    c = io::load_scenario(o.scenario);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.budget) {
    c.design_budget = *o.budget;
    c.budgets = {*o.budget};
  }
  if (o.features) c.rff_features = *o.features;
  if (o.realizations) c.realizations = *o.realizations;
  if (o.algorithm && (*o.algorithm == "greedy" || *o.algorithm == "lazy")) c.algorithm = *o.algorithm;
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError(path.string() + ": cannot open for writing");
  return out;
}

/// Slabs along the first kernel input, one group per slab.
std::vector<int> slab_partition(const Scenario& s, std::size_t groups) {
  const int axis = s.kernel_inputs.front();
  double lo = s.candidates.front()(axis), hi = lo;
  for (const auto& c : s.candidates) {
    lo = std::min(lo, c(axis));
    hi = std::max(hi, c(axis));
  }
  std::vector<int> part(s.candidates.size(), 0);
  const double width = (hi - lo) / static_cast<double>(groups);
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    const double u = width > 0 ? (s.candidates[i](axis) - lo) / width : 0.0;
    part[i] = static_cast<int>(std::min<double>(static_cast<double>(groups) - 1, std::floor(u)));
  }
  return part;
}

DesignResult run_design(const Scenario& s, const Options& o, const std::string& algorithm) {
  const DesignProblem problem = s.design_problem(s.config.design_budget);
  if (algorithm == "greedy") return greedy_design(problem);
  if (algorithm == "lazy") return lazy_greedy_design(problem);
  if (algorithm == "exhaustive") return exhaustive_design(problem);
  if (algorithm == "matroid") {
    if (o.groups < 1) throw ArgumentError("--groups must be >= 1");
    std::map<int, std::size_t> limits;
    const std::size_t quota = (problem.budget + o.groups - 1) / o.groups;
    for (std::size_t g = 0; g < o.groups; ++g) limits[static_cast<int>(g)] = quota;
    return partition_matroid_greedy(problem, slab_partition(s, o.groups), limits);
  }
  throw ArgumentError("unknown algorithm '" + algorithm + "'");
}

ObservationSet designed_observations(const Scenario& s, const DesignResult& design) {
  const auto truth = true_states(s.system, s.candidates, s.config.grid(), s.config.substeps);
  return observe_candidates(s, truth, design.selected_indices, realization_seed(s.config.seed, 0));
}

std::vector<std::string> cmd_simulate(const Scenario& s, const fs::path& dir) {
  const auto grid = s.config.grid();
  const auto truth = true_states(s.system, s.candidates, grid, s.config.substeps);
  const auto proxy = proxy_states(s.system, s.candidates, grid, s.config.substeps);
  std::vector<std::size_t> all(s.candidates.size());
  std::iota(all.begin(), all.end(), 0);
  const ObservationSet obs = observe_candidates(s, truth, all, realization_seed(s.config.seed, 0));
  {
    auto out = open_out(dir / "true_trajectories.csv");
    io::write_trajectories_csv(out, truth);
  }
  {
    auto out = open_out(dir / "proxy_trajectories.csv");
    io::write_trajectories_csv(out, proxy);
  }
  {
    auto out = open_out(dir / "observations.csv");
    write_csv(out, obs);
  }
  io::write_json((dir / "observations.json").string(), io::to_json(obs));
  return {"true_trajectories.csv", "proxy_trajectories.csv", "observations.csv", "observations.json"};
}

std::vector<std::string> cmd_design(const Scenario& s, const Options& o, const fs::path& dir) {
  const std::string algorithm = o.algorithm.value_or(s.config.algorithm);
  const DesignResult r = run_design(s, o, algorithm);
  Json j = io::to_json(r);
  j["algorithm"] = algorithm;
  io::write_json((dir / "design.json").string(), j);
  std::cout << "selected";
  for (auto i : r.selected_indices) std::cout << ' ' << i;
  std::cout << "\nobjective " << r.objective << " evaluations " << r.evaluations << '\n';
  return {"design.json"};
}

std::vector<std::string> cmd_fit(const Scenario& s, const Options& o, const fs::path& dir) {
  const DesignResult design = run_design(s, o, o.algorithm.value_or(s.config.algorithm));
  const ObservationSet obs = designed_observations(s, design);
  const GpPosterior gp = GpPosterior::fit(obs, s.config.kernel);
  io::write_json((dir / "design.json").string(), io::to_json(design));
  io::write_json((dir / "observations.json").string(), io::to_json(obs));
  io::write_json((dir / "gp.json").string(), io::to_json(gp));
  const BatchField truth = [&s](const StateList& pts) {
    Matrix m(static_cast<Eigen::Index>(pts.size()), s.learned_dim());
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = s.correction_slice(pts[i]).transpose();
    return m;
  };
  const double err = field_error([&gp](const StateList& p) { return gp.mean(p); }, truth, s.metric_box,
                                 s.config.metric_resolution);
  std::cout << "field error " << err << '\n';
  return {"design.json", "observations.json", "gp.json"};
}

std::vector<std::string> cmd_emulate(const Scenario& s, const Options& o, const fs::path& dir) {
  const DesignResult design = run_design(s, o, o.algorithm.value_or(s.config.algorithm));
  const ObservationSet obs = designed_observations(s, design);
  const FeatureMap map = sample_features(s.config.kernel, static_cast<int>(s.kernel_inputs.size()),
                                         s.config.rff_features, derive_seed(s.config.seed, kFeatureStream));
  const RffModel model = fit_ridge(obs, map, s.config.rff_ridge);
  io::write_json((dir / "rff.json").string(), io::to_json(model));

  Rng rng = Rng::stream(s.config.seed, kEmulateStream);
  const std::size_t n = std::min(s.config.test_seeds, s.candidates.size());
  std::vector<std::size_t> order(s.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);
  StateList tests;
  for (std::size_t i = 0; i < n; ++i) tests.push_back(s.candidates[order[i]]);

  const auto grid = s.config.grid();
  const VectorField field = corrected_field(s, [&model](const State& x) { return emulate_query(model, x); });
  std::vector<Trajectory> emulated(tests.size(), Trajectory{State(), grid, {}, ModelTag::emulated_model});
  parallel_for(tests.size(), [&](std::size_t i) {
    emulated[i] = integrate_field(field, s.system.dim, tests[i], grid, s.config.substeps, ModelTag::emulated_model);
  });
  const auto truth = true_states(s.system, tests, grid, s.config.substeps);
  {
    auto out = open_out(dir / "emulated_trajectories.csv");
    io::write_trajectories_csv(out, emulated);
  }
  {
    auto out = open_out(dir / "true_trajectories.csv");
    io::write_trajectories_csv(out, truth);
  }
  return {"rff.json", "emulated_trajectories.csv", "true_trajectories.csv"};
}

std::vector<std::string> cmd_benchmark(const Scenario& s, const Options& o, const fs::path& dir) {
  std::vector<Method> methods;
  if (o.methods.empty()) {
    methods = {Method::design, Method::random, Method::agnostic};
  } else {
    for (const auto& m : o.methods) methods.push_back(method_from_string(m));
  }
  const BenchReport report = run_comparison(s, methods, s.config.realizations, s.config.budgets);
  io::write_json((dir / "report.json").string(), io::to_json(report));
  {
    auto out = open_out(dir / "report.csv");
    io::write_report_csv(out, report);
  }
  Json timings(report.timings);
  io::write_json((dir / "timings.json").string(), timings);
  for (const auto& sm : report.summaries) {
    std::cout << to_string(sm.method) << " K=" << sm.budget << " mean " << sm.mean << " sd " << sm.stddev << '\n';
  }
  std::cout << "reference " << report.correction_energy << '\n';
  return {"report.json", "report.csv"};
}

std::vector<std::string> cmd_validate_bounds(const Scenario& s, const Options& o, const fs::path& dir) {
  const DesignResult design = run_design(s, o, o.algorithm.value_or(s.config.algorithm));
  const DesignProblem problem = s.design_problem(s.config.design_budget);
  const auto report = validate_bound(problem, design.selected_indices, o.perturbation, o.trials,
                                     derive_seed(s.config.seed, 0x626f756eULL));
  Json j = io::to_json(report);
  if (problem.noise.is_isotropic()) {
    j["mi"] = mutual_information(problem, design.selected_indices);
    j["mi_lower_bound"] = mi_lower_bound(problem, design.selected_indices);
  }
  io::write_json((dir / "bounds.json").string(), j);
  std::cout << "all within " << (report.all_within ? "yes" : "no") << ", max ratio " << report.max_ratio
            << ", vacuous " << report.vacuous_trials << '\n';
  return {"bounds.json"};
}

void write_manifest(const fs::path& dir, const Options& o, const ScenarioConfig& c,
                    const std::vector<std::string>& outputs) {
  Json seeds = {{"master", c.seed}, {"realizations", c.realizations}};
  Json j = {{"kind", "manifest"},
            {"subcommand", o.subcommand},
            {"config_hash", io::config_hash(c)},
            {"scenario", io::to_json(c)},
            {"overrides", overrides_json(o)},
            {"seeds", seeds},
            {"versions",
             {{"gpcorrect", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"compiler", __VERSION__}}},
            {"outputs", outputs}};
  io::write_json((dir / "manifest.json").string(), j);
}

int execute(Options o) {
  log::set_verbosity(1 + o.verbosity);
  if (o.threads > 0) set_thread_count(o.threads);

  ScenarioConfig config;
  if (o.subcommand == "replay") {
    const Json m = io::read_json(o.manifest);
    if (!m.contains("kind") || m["kind"] != "manifest") throw io::ConfigError(o.manifest + ": not a manifest");
    const std::string out = o.output;
    Options replay;
    replay.subcommand = m.at("subcommand").get<std::string>();
    replay.output = out;
    replay.threads = o.threads;
    replay.verbosity = o.verbosity;
    apply_overrides(m.at("overrides"), replay);
    config = io::scenario_from_json(m.at("scenario"));
    if (io::config_hash(config) != m.at("config_hash").get<std::string>()) {
      throw io::ConfigError(o.manifest + ": config hash mismatch");
    }
    o = replay;
  } else {
    if (o.scenario.empty()) throw ArgumentError("--scenario is required");
    config = resolve_config(o);
  }

  const fs::path dir(o.output);
  fs::create_directories(dir);
  const Scenario s = build_scenario(config);
  std::vector<std::string> outputs;
  if (o.subcommand == "simulate") {
    outputs = cmd_simulate(s, dir);
  } else if (o.subcommand == "design") {
    outputs = cmd_design(s, o, dir);
  } else if (o.subcommand == "fit") {
    outputs = cmd_fit(s, o, dir);
  } else if (o.subcommand == "emulate") {
    outputs = cmd_emulate(s, o, dir);
  } else if (o.subcommand == "benchmark") {
    outputs = cmd_benchmark(s, o, dir);
  } else if (o.subcommand == "validate-bounds") {
    outputs = cmd_validate_bounds(s, o, dir);
  } else {
    throw ArgumentError("unknown subcommand '" + o.subcommand + "'");
  }
  write_manifest(dir, o, config, outputs);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Experimental design for learning corrections to misspecified ODE models", "gpcorrect"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto common = [&o](CLI::App* sub, bool scenario) {
    if (scenario) sub->add_option("--scenario", o.scenario, "Scenario JSON file, or linear_quadratic / gravity")->required();
    sub->add_option("--output,-o", o.output, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--threads", o.threads, "Worker thread cap (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("-v,--verbose", o.verbosity, "More diagnostics (repeatable)");
  };
  const std::vector<std::string> algorithms = {"greedy", "lazy", "exhaustive", "matroid"};

  auto* simulate = app.add_subcommand("simulate", "True and proxy trajectories plus noisy corrections to CSV");
  common(simulate, true);

  auto* design = app.add_subcommand("design", "Select initial conditions; writes design.json");
  common(design, true);
  design->add_option("--budget", o.budget, "Number of seeds K")->check(CLI::PositiveNumber);
  design->add_option("--algorithm", o.algorithm, "Selection algorithm")->check(CLI::IsMember(algorithms));
  design->add_option("--groups", o.groups, "Partition cells for --algorithm matroid")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "Design, observe and fit the GP correction; writes gp.json");
  common(fit, true);
  fit->add_option("--budget", o.budget, "Number of seeds K")->check(CLI::PositiveNumber);
  fit->add_option("--algorithm", o.algorithm, "Selection algorithm")->check(CLI::IsMember(algorithms));

  auto* emulate = app.add_subcommand("emulate", "Fit random Fourier features and emulate test trajectories");
  common(emulate, true);
  emulate->add_option("--budget", o.budget, "Number of seeds K")->check(CLI::PositiveNumber);
  emulate->add_option("--features,-D", o.features, "Number of random features")->check(CLI::PositiveNumber);
  emulate->add_option("--algorithm", o.algorithm, "Selection algorithm")->check(CLI::IsMember(algorithms));

  auto* benchmark = app.add_subcommand("benchmark", "Compare design, random and agnostic learning");
  common(benchmark, true);
  benchmark->add_option("--budget", o.budget, "Single budget K (default: the scenario's budget list)")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--realizations", o.realizations, "Noise realizations")->check(CLI::PositiveNumber);
  benchmark->add_option("--methods", o.methods, "Subset of design, random, agnostic")
      ->check(CLI::IsMember({"design", "random", "agnostic"}));
  benchmark->add_option("--algorithm", o.algorithm, "greedy or lazy")->check(CLI::IsMember({"greedy", "lazy"}));

  auto* bounds = app.add_subcommand("validate-bounds", "Check the MI perturbation bound on designed seeds");
  common(bounds, true);
  bounds->add_option("--budget", o.budget, "Number of seeds K")->check(CLI::PositiveNumber);
  bounds->add_option("--perturbation", o.perturbation, "Ball radius of the trajectory perturbation")
      ->check(CLI::PositiveNumber);
  bounds->add_option("--trials", o.trials, "Perturbation trials")->check(CLI::PositiveNumber);
  bounds->add_option("--algorithm", o.algorithm, "Selection algorithm")->check(CLI::IsMember(algorithms));

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", o.manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  common(replay, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  o.subcommand = app.get_subcommands().front()->get_name();

  try {
    return execute(o);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace gpc::cli
