#include "flights/config.hpp"

#include "flights/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace flights {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::optional<Window> window_from(const json& j, const std::string& where) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + " must be a [lo, hi] pair");
    Window w{j[0].get<double>(), j[1].get<double>()};
    if (!(w.lo > 0.0 && w.lo < w.hi)) throw ConfigError(where + " must satisfy 0 < lo < hi");
    return w;
}

json window_to(const std::optional<Window>& w) { return w ? json::array({w->lo, w->hi}) : json(nullptr); }

template <class T>
json optional_to(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace

json to_json(const DomainSpec& spec) {
    json j;
    j["type"] = spec.type_name();
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, shapes::Square>) j["side"] = s.side;
            if constexpr (std::is_same_v<S, shapes::Rectangle>) j["a"] = s.a, j["b"] = s.b;
            if constexpr (std::is_same_v<S, shapes::Disk>) j["radius"] = s.radius;
            if constexpr (std::is_same_v<S, shapes::Box3d>) j["a"] = s.a, j["b"] = s.b, j["c"] = s.c;
            if constexpr (std::is_same_v<S, shapes::KochSnowflake>) j["generation"] = s.generation, j["side"] = s.side;
        },
        spec.shape);
    j["offset"] = spec.offset;
    return j;
}

DomainSpec domain_from_json(const json& j) {
    const std::string where = "domain";
    if (!j.is_object() || !j.contains("type")) throw ConfigError("domain needs a 'type'");
    const auto type = get<std::string>(j, "type", where);
    DomainSpec spec;
    auto num = [&](const char* key, double fallback) { return j.contains(key) ? get<double>(j, key, where) : fallback; };
    if (type == "square") {
        reject_unknown(j, {"type", "side", "offset"}, where);
        spec.shape = shapes::Square{num("side", 1.0)};
    } else if (type == "rectangle") {
        reject_unknown(j, {"type", "a", "b", "offset"}, where);
        spec.shape = shapes::Rectangle{num("a", 1.0), num("b", 1.0)};
    } else if (type == "disk") {
        reject_unknown(j, {"type", "radius", "offset"}, where);
        spec.shape = shapes::Disk{num("radius", 1.0)};
    } else if (type == "box3d") {
        reject_unknown(j, {"type", "a", "b", "c", "offset"}, where);
        spec.shape = shapes::Box3d{num("a", 1.0), num("b", 1.0), num("c", 1.0)};
    } else if (type == "koch_snowflake") {
        reject_unknown(j, {"type", "generation", "side", "offset"}, where);
        spec.shape = shapes::KochSnowflake{j.contains("generation") ? get<int>(j, "generation", where) : 0,
                                           num("side", 1.0)};
    } else {
        throw ConfigError("unknown domain type '" + type + "'");
    }
    if (j.contains("offset")) spec.offset = get<std::vector<double>>(j, "offset", where);
    else spec.offset.assign(static_cast<std::size_t>(spec.dimension()), 1.0 / 3.0);
    return spec;
}

SimConfig config_from_json(const json& j, SimConfig c) {
    reject_unknown(j, {"domain", "epsilon", "min_generation", "policy", "n_flights", "master_seed", "workers",
                       "output_dir", "analysis", "verify"},
                   "config");
    const std::string where = "config";
    if (j.contains("domain")) c.domain = domain_from_json(j["domain"]);
    if (j.contains("epsilon")) c.epsilon = get<double>(j, "epsilon", where);
    if (j.contains("min_generation")) {
        if (j["min_generation"].is_null()) c.min_generation.reset();
        else c.min_generation = get<int>(j, "min_generation", where);
    }
    if (j.contains("n_flights")) c.n_flights = get<std::int64_t>(j, "n_flights", where);
    if (j.contains("master_seed")) c.master_seed = get<std::uint64_t>(j, "master_seed", where);
    if (j.contains("workers")) c.workers = get<int>(j, "workers", where);
    if (j.contains("output_dir")) c.output_dir = get<std::string>(j, "output_dir", where);
    if (j.contains("policy")) {
        const json& p = j["policy"];
        reject_unknown(p, {"c_step", "dt_max", "delta_abs", "t_max", "bridge_correction"}, "policy");
        auto opt = [&](const char* key, std::optional<double>& field) {
            if (!p.contains(key)) return;
            if (p[key].is_null()) field.reset();
            else field = get<double>(p, key, "policy");
        };
        if (p.contains("c_step")) c.policy.c_step = get<double>(p, "c_step", "policy");
        opt("dt_max", c.policy.dt_max);
        opt("delta_abs", c.policy.delta_abs);
        opt("t_max", c.policy.t_max);
        if (p.contains("bridge_correction")) c.policy.bridge_correction = get<bool>(p, "bridge_correction", "policy");
    }
    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        reject_unknown(a, {"bootstrap_resamples", "points_per_decade", "target_dimension", "time_window",
                           "length_window"},
                       "analysis");
        if (a.contains("bootstrap_resamples")) c.bootstrap_resamples = get<int>(a, "bootstrap_resamples", "analysis");
        if (a.contains("points_per_decade")) c.points_per_decade = get<int>(a, "points_per_decade", "analysis");
        if (a.contains("target_dimension")) {
            if (a["target_dimension"].is_null()) c.target_dimension.reset();
            else c.target_dimension = get<double>(a, "target_dimension", "analysis");
        }
        if (a.contains("time_window")) c.time_window = window_from(a["time_window"], "analysis.time_window");
        if (a.contains("length_window")) c.length_window = window_from(a["length_window"], "analysis.length_window");
    }
    if (j.contains("verify")) {
        const json& v = j["verify"];
        reject_unknown(v, {"oracle_paths"}, "verify");
        if (v.contains("oracle_paths")) c.oracle_paths = get<std::int64_t>(v, "oracle_paths", "verify");
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j, std::move(base));
}

json provenance_json(const SimConfig& c) {
    json j;
    j["format_version"] = kFormatVersion;
    j["domain"] = to_json(c.domain);
    j["epsilon"] = c.epsilon;
    j["min_generation"] = c.resolved_min_generation();
    j["policy"] = {{"c_step", c.policy.c_step},
                   {"dt_max", optional_to(c.policy.dt_max)},
                   {"delta_abs", optional_to(c.policy.delta_abs)},
                   {"t_max", optional_to(c.policy.t_max)},
                   {"bridge_correction", c.policy.bridge_correction}};
    j["n_flights"] = c.n_flights;
    j["master_seed"] = c.master_seed;
    j["analysis"] = {{"bootstrap_resamples", c.bootstrap_resamples},
                     {"points_per_decade", c.points_per_decade},
                     {"target_dimension", optional_to(c.target_dimension)},
                     {"time_window", window_to(c.time_window)},
                     {"length_window", window_to(c.length_window)}};
    j["verify"] = {{"oracle_paths", c.oracle_paths}};
    return j;
}

int SimConfig::resolved_min_generation() const {
    if (min_generation) return *min_generation;
    return static_cast<int>(std::floor(std::log2(epsilon))) - 3;
}

StepPolicy SimConfig::resolve_policy(double r_omega) const {
    StepPolicy p = StepPolicy::defaults(epsilon, r_omega);
    p.c_step = policy.c_step;
    if (policy.dt_max) p.dt_max = *policy.dt_max;
    if (policy.delta_abs) p.delta_abs = *policy.delta_abs;
    if (policy.t_max) p.t_max = *policy.t_max;
    p.bridge_correction = policy.bridge_correction;
    p.validate();
    return p;
}

void SimConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
    if (epsilon < std::ldexp(1.0, resolved_min_generation() + 3))
        throw ConfigError("epsilon must be >= 2^(min_generation + 3)");
    if (!(policy.c_step > 0.0 && policy.c_step < 1.0)) throw ConfigError("policy.c_step must lie in (0, 1)");
    for (const auto* v : {&policy.dt_max, &policy.delta_abs, &policy.t_max})
        if (*v && !(**v > 0.0)) throw ConfigError("policy values must be positive");
    if (n_flights < 1) throw ConfigError("n_flights must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (bootstrap_resamples < 0) throw ConfigError("bootstrap_resamples must be >= 0");
    if (points_per_decade < 2) throw ConfigError("points_per_decade must be >= 2");
    if (oracle_paths < 1) throw ConfigError("verify.oracle_paths must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

SimConfig preset(const std::string& name) {
    SimConfig c;
    c.domain.offset = {1.0 / 3.0, 1.0 / 3.0};
    if (name == "square-quick" || name == "square-full") {
        c.domain.shape = shapes::Square{1.0};
        c.epsilon = 1.0 / 64.0;
        c.n_flights = name == "square-quick" ? 20000 : 100000;
        c.oracle_paths = name == "square-quick" ? 20000 : 100000;
    } else if (name == "koch-quick" || name == "koch-full") {
        c.domain.shape = shapes::KochSnowflake{6, 1.0};
        c.epsilon = 1.0 / 128.0;
        c.n_flights = name == "koch-quick" ? 20000 : 200000;
        c.oracle_paths = name == "koch-quick" ? 20000 : 100000;
    } else {
        throw ConfigError("unknown preset '" + name + "' (known: square-quick, square-full, koch-quick, koch-full)");
    }
    // Deep enough for the layer-count hypothesis to see several scales.
    c.min_generation = -12;
    c.master_seed = 20240601;
    c.output_dir = "out/" + name;
    return c;
}

} // namespace flights
