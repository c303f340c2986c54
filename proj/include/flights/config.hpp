#pragma once

#include "flights/analysis.hpp"
#include "flights/flight.hpp"
#include "flights/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace flights {

inline constexpr int kFormatVersion = 1;

// Unset fields resolve through StepPolicy::defaults once R_Omega is known.
struct PolicySettings {
    double c_step = 0.1;
    std::optional<double> dt_max;
    std::optional<double> delta_abs;
    std::optional<double> t_max;
    bool bridge_correction = true;
};

struct SimConfig {
    DomainSpec domain;
    double epsilon = 1.0 / 64.0;
    std::optional<int> min_generation;  // default floor(log2 eps) - 3
    PolicySettings policy;
    std::int64_t n_flights = 10000;
    std::uint64_t master_seed = 1;
    int workers = 1;
    std::string output_dir = "out";

    int bootstrap_resamples = 200;
    int points_per_decade = 16;
    std::optional<double> target_dimension;
    std::optional<Window> time_window;
    std::optional<Window> length_window;

    std::int64_t oracle_paths = 20000;  // sampler-vs-cube check in `verify`

    int resolved_min_generation() const;
    StepPolicy resolve_policy(double r_omega) const;
    void validate() const;
};

// Parsing is strict: unknown keys and wrong types raise ConfigError.
SimConfig config_from_json(const nlohmann::json& j, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});

// Everything that determines results. Scheduling (workers) and the output
// location are left out so outputs compare byte-for-byte across runs.
nlohmann::json provenance_json(const SimConfig& config);
nlohmann::json to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const nlohmann::json& j);

// Named presets: square-quick, square-full, koch-quick, koch-full.
SimConfig preset(const std::string& name);

} // namespace flights
