#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpcorrect/bench.hpp"
#include "gpcorrect/design.hpp"
#include "gpcorrect/errors.hpp"
#include "gpcorrect/gp.hpp"
#include "gpcorrect/kernels.hpp"
#include "gpcorrect/observation.hpp"
#include "gpcorrect/rff.hpp"
#include "gpcorrect/scenario.hpp"

namespace gpc::io {

using Json = nlohmann::ordered_json;

/// Malformed configuration or artifact; the message names the offending key path.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

Json to_json(const KernelConfig& kernel);
KernelConfig kernel_from_json(const Json& j, const std::string& path = "kernel");

Json to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const Json& j, const std::string& path = "noise");

Json to_json(const ObservationSet& set);
ObservationSet observations_from_json(const Json& j);

/// States, kernel, noise and weights; factors are recomputed on load.
Json to_json(const GpPosterior& gp);
GpPosterior posterior_from_json(const Json& j);

Json to_json(const DesignResult& result);

/// Seed, D, ridge, weights and a checksum of the first frequency row.
/// Loading regenerates the features and rejects a checksum mismatch.
Json to_json(const RffModel& model);
RffModel rff_from_json(const Json& j);

Json to_json(const BenchReport& report);
Json to_json(const BoundValidationReport& report);
Json to_json(const TrajectoryStudy& study);

/// Unknown keys anywhere in the document are an error.  Missing keys take
/// the defaults of the named scenario.
Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const Json& j);
ScenarioConfig load_scenario(const std::string& path);

/// FNV-1a over the compact dump of the config.
std::string config_hash(const ScenarioConfig& config);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

/// One row per realization x method x budget.
void write_report_csv(std::ostream& os, const BenchReport& report);
/// Columns trajectory, i, t, y_1..y_d.
void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories);

}  // namespace gpc::io
