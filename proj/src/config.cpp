#include "robex/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace robex {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

double number_or(const json& j, const char* key, const std::string& path, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return as_number(j.at(key), path + "." + key);
}

int int_or(const json& j, const char* key, const std::string& path, int fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return as_int(j.at(key), path + "." + key);
}

Point as_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty() || j.size() > 2) {
        fail(path, "expected [x] or [x, y]");
    }
    Point p{0.0, 0.0};
    for (std::size_t i = 0; i < j.size(); ++i) {
        p[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
    }
    return p;
}

Edge as_edge(const json& j, const std::string& path) {
    const std::string name = as_string(j, path);
    if (name == "left") return Edge::Left;
    if (name == "right") return Edge::Right;
    if (name == "bottom") return Edge::Bottom;
    if (name == "top") return Edge::Top;
    fail(path, "expected one of left, right, bottom, top");
}

DomainSpec parse_domain(const json& j) {
    DomainSpec domain;
    const std::string kind = as_string(require(j, "kind", "domain"), "domain.kind");
    if (kind == "interval") {
        domain.kind = DomainKind::Interval;
    } else if (kind == "rectangle") {
        domain.kind = DomainKind::Rectangle;
    } else {
        fail("domain.kind", "expected interval or rectangle");
    }
    const json& lengths = require(j, "lengths", "domain");
    if (!lengths.is_array()) fail("domain.lengths", "expected an array");
    domain.lengths.clear();
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        domain.lengths.push_back(
            as_number(lengths[i], "domain.lengths[" + std::to_string(i) + "]"));
    }
    domain.diffusivity = number_or(j, "diffusivity", "domain", 1.0);
    domain.grid_resolution = int_or(j, "grid_resolution", "domain", 64);
    try {
        domain.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());  // messages already carry the domain.* path
    }
    return domain;
}

SensorSpec parse_sensor(const json& j, const DomainSpec& domain, const std::string& path) {
    SensorSpec sensor;
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    if (kind == "interior_pointwise") {
        sensor.kind = SensorKind::InteriorPointwise;
        sensor.location = as_point(require(j, "location", path), path + ".location");
    } else if (kind == "boundary_pointwise") {
        sensor.kind = SensorKind::BoundaryPointwise;
        sensor.location = as_point(require(j, "location", path), path + ".location");
    } else if (kind == "interior_zone") {
        sensor.kind = SensorKind::InteriorZone;
        sensor.zone_lo = as_point(require(j, "zone_lo", path), path + ".zone_lo");
        sensor.zone_hi = as_point(require(j, "zone_hi", path), path + ".zone_hi");
    } else if (kind == "boundary_zone") {
        sensor.kind = SensorKind::BoundaryZone;
        sensor.edge = as_edge(require(j, "edge", path), path + ".edge");
        const json& interval = require(j, "interval", path);
        if (!interval.is_array() || interval.size() != 2) {
            fail(path + ".interval", "expected [lo, hi]");
        }
        sensor.edge_lo = as_number(interval[0], path + ".interval[0]");
        sensor.edge_hi = as_number(interval[1], path + ".interval[1]");
    } else {
        fail(path + ".kind",
             "expected one of interior_pointwise, interior_zone, boundary_pointwise, "
             "boundary_zone");
    }
    try {
        sensor.validate(domain);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return sensor;
}

RegionPtr parse_region(const json& j, const DomainSpec& domain, const std::string& path) {
    try {
        if (j.is_string()) {
            if (j.get<std::string>() != "full") fail(path, "expected \"full\" or a piece list");
            return full_boundary(domain);
        }
        if (!j.is_array() || j.empty()) fail(path, "expected \"full\" or a non-empty piece list");
        std::vector<BoundaryPiece> pieces;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const std::string ppath = path + "[" + std::to_string(i) + "]";
            const json& pj = j[i];
            BoundaryPiece piece;
            piece.edge = as_edge(require(pj, "edge", ppath), ppath + ".edge");
            if (pj.contains("interval")) {
                const json& interval = pj.at("interval");
                if (!interval.is_array() || interval.size() != 2) {
                    fail(ppath + ".interval", "expected [lo, hi]");
                }
                piece.lo = as_number(interval[0], ppath + ".interval[0]");
                piece.hi = as_number(interval[1], ppath + ".interval[1]");
            } else if (domain.kind == DomainKind::Rectangle) {
                fail(ppath + ".interval", "missing (rectangle pieces need an edge interval)");
            }
            pieces.push_back(piece);
        }
        return make_boundary_region(domain, std::move(pieces));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    ScenarioConfig config;
    config.domain = parse_domain(require(j, "domain", "config"));

    config.modes_per_axis = int_or(j, "modes_per_axis", "config", 8);
    if (config.modes_per_axis < 1) fail("modes_per_axis", "must be at least 1");

    const json& sensors = require(j, "sensors", "config");
    if (!sensors.is_array() || sensors.empty()) fail("sensors", "expected a non-empty array");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        config.sensors.push_back(
            parse_sensor(sensors[i], config.domain, "sensors[" + std::to_string(i) + "]"));
    }

    const json& regions = require(j, "regions", "config");
    if (!regions.is_array() || regions.empty()) fail("regions", "expected a non-empty array");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        config.regions.push_back(
            parse_region(regions[i], config.domain, "regions[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i + 1 < config.regions.size(); ++i) {
        if (!subset_of(*config.regions[i], *config.regions[i + 1])) {
            fail("regions[" + std::to_string(i) + "]",
                 "not contained in regions[" + std::to_string(i + 1) + "]");
        }
    }

    config.horizon = number_or(j, "horizon", "config", 1.0);
    if (!(config.horizon > 0.0)) fail("horizon", "must be positive");
    config.time_steps = int_or(j, "time_steps", "config", 200);
    if (config.time_steps < 1) fail("time_steps", "must be at least 1");
    config.observability_threshold = number_or(j, "observability_threshold", "config", 1e-8);
    if (!(config.observability_threshold > 0.0)) {
        fail("observability_threshold", "must be positive");
    }

    if (j.contains("observer")) {
        const json& o = j.at("observer");
        const std::string method =
            as_string(require(o, "method", "observer"), "observer.method");
        if (method == "modal_shift") {
            config.observer.method = GainMethod::ModalShift;
        } else if (method == "scaled_adjoint") {
            config.observer.method = GainMethod::ScaledAdjoint;
        } else {
            fail("observer.method", "expected modal_shift or scaled_adjoint");
        }
        config.observer.sigma_target = number_or(o, "sigma_target", "observer", 1.0);
        if (!(config.observer.sigma_target > 0.0)) fail("observer.sigma_target", "must be positive");
        config.observer.horizon = number_or(o, "horizon", "observer", 5.0);
        if (!(config.observer.horizon > 0.0)) fail("observer.horizon", "must be positive");
        config.observer.time_steps = int_or(o, "time_steps", "observer", 1000);
        if (config.observer.time_steps < 1) fail("observer.time_steps", "must be at least 1");
    }

    if (j.contains("reconstruction")) {
        const json& r = j.at("reconstruction");
        config.reconstruction.epsilon = number_or(r, "epsilon", "reconstruction", 1e-10);
        if (!(config.reconstruction.epsilon >= 0.0)) {
            fail("reconstruction.epsilon", "must be non-negative");
        }
        config.reconstruction.trials = int_or(r, "trials", "reconstruction", 50);
        if (config.reconstruction.trials < 1) fail("reconstruction.trials", "must be at least 1");
        if (r.is_object() && r.contains("seed")) {
            const json& s = r.at("seed");
            if (!s.is_number_integer()) fail("reconstruction.seed", "expected an integer");
            config.reconstruction.seed = s.get<std::uint64_t>();
        }
    }

    if (j.contains("sweep_locations")) {
        const json& sweep = j.at("sweep_locations");
        if (!sweep.is_array()) fail("sweep_locations", "expected an array of points");
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            config.sweep_locations.push_back(
                as_point(sweep[i], "sweep_locations[" + std::to_string(i) + "]"));
        }
    }
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace robex
