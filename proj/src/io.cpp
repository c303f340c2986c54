#include "flights/io.hpp"

#include "flights/config.hpp"
#include "flights/errors.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace flights {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& out, const json& config) {
    out << "# format_version=" << kFormatVersion << '\n';
    out << "# config=" << config.dump() << '\n';
}

} // namespace

template <int Dim>
void write_cubes_csv(std::ostream& out, const WhitneyDecomposition<Dim>& decomposition, const json& config) {
    write_header(out, config);
    out << "generation";
    for (int i = 0; i < Dim; ++i) out << ",index_" << i;
    out << ",dist_lo,dist_hi\n";
    for (auto it = decomposition.by_generation().rbegin(); it != decomposition.by_generation().rend(); ++it) {
        for (const auto& wc : it->second) {
            out << wc.cube.generation;
            for (int i = 0; i < Dim; ++i) out << ',' << wc.cube.index[i];
            out << ',' << format_double(wc.bounds.lo) << ',' << format_double(wc.bounds.hi) << '\n';
        }
    }
}

void write_layer_counts_csv(std::ostream& out, const std::map<int, std::size_t>& counts, const json& config) {
    write_header(out, config);
    out << "generation,j,count\n";
    for (auto it = counts.rbegin(); it != counts.rend(); ++it)
        out << it->first << ',' << -it->first << ',' << it->second << '\n';
}

template <int Dim>
json to_json(const FlightRecord<Dim>& r) {
    auto vec = [](const Point<Dim>& p) {
        json a = json::array();
        for (int i = 0; i < Dim; ++i) a.push_back(p[i]);
        return a;
    };
    json index = json::array();
    for (int i = 0; i < Dim; ++i) index.push_back(r.start_cube.index[i]);
    json shells = json::object();
    for (const auto& [k, t] : r.shell_occupation) shells[std::to_string(k)] = t;
    return json{{"flight_id", r.flight_id},
                {"start_cube", {{"generation", r.start_cube.generation}, {"index", index}}},
                {"start", vec(r.start)},
                {"tau", r.tau},
                {"exit_point", vec(r.exit_point)},
                {"displacement", r.displacement},
                {"censored", r.censored},
                {"shell_occupation", shells}};
}

template <int Dim>
void write_flights_jsonl(std::ostream& out, const std::vector<FlightRecord<Dim>>& records, const json& config) {
    out << json{{"format_version", kFormatVersion}, {"dimension", Dim}, {"config", config}}.dump() << '\n';
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

FlightFile read_flights_jsonl(std::istream& in) {
    FlightFile file;
    std::string line;
    std::size_t line_no = 0;
    try {
        if (!std::getline(in, line)) throw ConfigError("flight file is empty");
        ++line_no;
        const json header = json::parse(line);
        if (!header.contains("format_version") || header["format_version"].get<int>() != kFormatVersion)
            throw ConfigError("unsupported flight file format version");
        file.config = header.at("config");
        file.dimension = header.at("dimension").get<int>();
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json r = json::parse(line);
            file.samples.push_back(
                {r.at("tau").get<double>(), r.at("displacement").get<double>(), r.at("censored").get<bool>()});
        }
    } catch (const json::exception& e) {
        throw ConfigError("flight file line " + std::to_string(line_no) + ": " + e.what());
    }
    return file;
}

void write_survival_csv(std::ostream& out, const SurvivalCurve& curve, const json& config) {
    write_header(out, config);
    out << "t,survival,stderr\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << format_double(curve.grid[i]) << ',' << format_double(curve.survival[i]) << ','
            << format_double(curve.std_error[i]) << '\n';
}

json to_json(const ExponentFit& f) {
    return json{{"exponent", f.exponent},
                {"intercept", f.intercept},
                {"window", {f.window.lo, f.window.hi}},
                {"ci_90", {f.ci_90.first, f.ci_90.second}},
                {"r_squared", f.r_squared},
                {"points", f.points},
                {"valid_resamples", f.valid_resamples}};
}

json to_json(const HypothesisReport& h) {
    if (!h.unavailable.empty()) return json{{"holds", false}, {"unavailable", h.unavailable}};
    return json{{"scale_exponents", h.scale_exponents},
                {"layer_sizes", h.layer_sizes},
                {"fitted_dimension", h.fitted_dimension},
                {"spread", h.spread},
                {"spread_limit", HypothesisReport::kSpreadLimit},
                {"holds", h.holds}};
}

json to_json(const DimensionEstimate& d) {
    json steps = json::array();
    for (const auto& [j, s] : d.step_slopes) steps.push_back({{"j", j}, {"slope", s}});
    return json{{"dimension", d.dimension},
                {"r_squared", d.r_squared},
                {"j_first", d.j_first},
                {"j_last", d.j_last},
                {"step_slopes", steps}};
}

json to_json(const VerificationReport& r) {
    json fits = json::object();
    for (const auto& [name, f] : r.time_fits) fits[name] = to_json(f);
    json j{{"domain", r.domain_name},
           {"dimension", r.dimension},
           {"epsilon", r.epsilon},
           {"r_omega", r.r_omega},
           {"measured_dimension", r.measured_dimension},
           {"known_dimension", r.known_dimension ? json(*r.known_dimension) : json(nullptr)},
           {"target_dimension", r.target_dimension},
           {"target_source", r.target_source},
           {"predicted_exponent_measured", r.predicted_exponent_measured},
           {"target_time_exponent", r.target_time_exponent},
           {"target_length_exponent", r.target_length_exponent},
           {"tolerance", r.tolerance},
           {"time_fits", fits},
           {"acceptance_window", "middle"},
           {"length_fit", to_json(r.length_fit)},
           {"time_pass", r.time_pass},
           {"length_pass", r.length_pass},
           {"pass", r.pass},
           {"hypothesis", to_json(r.hypothesis)}};
    if (r.non_self_similar_bound) {
        const auto& b = *r.non_self_similar_bound;
        j["non_self_similar_bound"] = {{"t", b.t}, {"bound", b.bound}, {"empirical", b.empirical}};
    }
    return j;
}

std::string to_text(const VerificationReport& r) {
    std::ostringstream os;
    auto fit_line_text = [&](const std::string& name, const ExponentFit& f) {
        os << "  " << name << " [" << format_double(f.window.lo) << ", " << format_double(f.window.hi)
           << "]: " << format_double(f.exponent) << "  (90% CI " << format_double(f.ci_90.first) << " .. "
           << format_double(f.ci_90.second) << ", R^2 " << format_double(f.r_squared) << ")\n";
    };
    os << "domain            " << r.domain_name << " (d = " << r.dimension << ")\n";
    os << "epsilon           " << format_double(r.epsilon) << "\n";
    os << "R_Omega           " << format_double(r.r_omega) << "\n";
    os << "Whitney dimension " << format_double(r.measured_dimension) << " (measured)\n";
    if (r.known_dimension) os << "known dimension   " << format_double(*r.known_dimension) << "\n";
    os << "target dimension  " << format_double(r.target_dimension) << " (" << r.target_source << ")\n";
    os << "\nsurvival exponent, target " << format_double(r.target_time_exponent) << " +- "
       << format_double(r.tolerance) << " (measured-dimension prediction "
       << format_double(r.predicted_exponent_measured) << ")\n";
    for (const auto& [name, f] : r.time_fits) fit_line_text(name, f);
    os << "  -> " << (r.time_pass ? "PASS" : "FAIL") << " on the middle window\n";
    os << "\nlength exponent, target " << format_double(r.target_length_exponent) << " +- "
       << format_double(r.tolerance) << "\n";
    fit_line_text("length", r.length_fit);
    os << "  -> " << (r.length_pass ? "PASS" : "FAIL") << "\n";
    if (!r.hypothesis.unavailable.empty())
        os << "\nlayer-count hypothesis: not evaluated (" << r.hypothesis.unavailable << ")\n";
    else
        os << "\nlayer-count hypothesis: fitted d_M " << format_double(r.hypothesis.fitted_dimension) << ", spread "
           << format_double(r.hypothesis.spread) << " -> " << (r.hypothesis.holds ? "holds" : "fails") << "\n";
    if (r.non_self_similar_bound) {
        os << "non-self-similar bound (t, bound, empirical):\n";
        const auto& b = *r.non_self_similar_bound;
        for (std::size_t i = 0; i < b.t.size(); ++i)
            os << "  " << format_double(b.t[i]) << "  " << format_double(b.bound[i]) << "  "
               << format_double(b.empirical[i]) << "\n";
    }
    os << "\noverall: " << (r.pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

template void write_cubes_csv<2>(std::ostream&, const WhitneyDecomposition<2>&, const json&);
template void write_cubes_csv<3>(std::ostream&, const WhitneyDecomposition<3>&, const json&);
template json to_json<2>(const FlightRecord<2>&);
template json to_json<3>(const FlightRecord<3>&);
template void write_flights_jsonl<2>(std::ostream&, const std::vector<FlightRecord<2>>&, const json&);
template void write_flights_jsonl<3>(std::ostream&, const std::vector<FlightRecord<3>>&, const json&);

} // namespace flights
