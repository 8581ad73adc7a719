#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "robex/boundary.hpp"
#include "robex/domain.hpp"
#include "robex/observer.hpp"
#include "robex/sensing.hpp"

namespace robex {

/// Raised on any malformed scenario file; the message starts with the path of
/// the offending field (e.g. "sensors[1].location: ...").
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct ObserverSettings {
    GainMethod method = GainMethod::ModalShift;
    double sigma_target = 1.0;
    double horizon = 5.0;
    int time_steps = 1000;
};

struct ReconstructionSettings {
    double epsilon = 1e-10;
    int trials = 50;
    std::uint64_t seed = 1;
};

/// A fully validated experiment scenario. regions is the nested list used by
/// the monotonicity experiment; regions.front() is the primary region every
/// other pipeline reports on.
struct ScenarioConfig {
    DomainSpec domain;
    int modes_per_axis = 8;
    std::vector<SensorSpec> sensors;
    std::vector<RegionPtr> regions;
    double horizon = 1.0;
    int time_steps = 200;
    double observability_threshold = 1e-8;
    ObserverSettings observer;
    ReconstructionSettings reconstruction;
    std::vector<Point> sweep_locations;  // optional; enables the sweep table
};

/// Parses and validates a JSON scenario. See the README for the schema.
ScenarioConfig parse_config(const std::string& text);

/// parse_config on the contents of the file at `path`.
ScenarioConfig load_config(const std::string& path);

}  // namespace robex
