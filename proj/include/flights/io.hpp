#pragma once

#include "flights/analysis.hpp"
#include "flights/flight.hpp"
#include "flights/whitney.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace flights {

// Shortest round-trip decimal form; stable across runs.
std::string format_double(double v);

// Comment header lines ("# format_version=1", "# config=<json>") followed
// by generation,index_0..index_{d-1},dist_lo,dist_hi rows, coarse first.
template <int Dim>
void write_cubes_csv(std::ostream& out, const WhitneyDecomposition<Dim>& decomposition, const nlohmann::json& config);

void write_layer_counts_csv(std::ostream& out, const std::map<int, std::size_t>& counts, const nlohmann::json& config);

template <int Dim>
nlohmann::json to_json(const FlightRecord<Dim>& record);

// First line: {"format_version":..,"config":{..}}; then one record per line.
template <int Dim>
void write_flights_jsonl(std::ostream& out, const std::vector<FlightRecord<Dim>>& records,
                         const nlohmann::json& config);

struct FlightFile {
    nlohmann::json config;
    int dimension = 0;
    std::vector<FlightSample> samples;
};

// Throws ConfigError on malformed input.
FlightFile read_flights_jsonl(std::istream& in);

void write_survival_csv(std::ostream& out, const SurvivalCurve& curve, const nlohmann::json& config);

nlohmann::json to_json(const ExponentFit& fit);
nlohmann::json to_json(const HypothesisReport& report);
nlohmann::json to_json(const DimensionEstimate& estimate);
nlohmann::json to_json(const VerificationReport& report);
std::string to_text(const VerificationReport& report);

extern template void write_cubes_csv<2>(std::ostream&, const WhitneyDecomposition<2>&, const nlohmann::json&);
extern template void write_cubes_csv<3>(std::ostream&, const WhitneyDecomposition<3>&, const nlohmann::json&);
extern template nlohmann::json to_json<2>(const FlightRecord<2>&);
extern template nlohmann::json to_json<3>(const FlightRecord<3>&);
extern template void write_flights_jsonl<2>(std::ostream&, const std::vector<FlightRecord<2>>&, const nlohmann::json&);
extern template void write_flights_jsonl<3>(std::ostream&, const std::vector<FlightRecord<3>>&, const nlohmann::json&);

} // namespace flights
