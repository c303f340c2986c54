#pragma once

#include "flights/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace flights::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsageError = 2, kInternalError = 3 };

// Each command writes into config.output_dir and returns kPass or
// kCheckFailed; configuration and IO problems are thrown.
int cmd_decompose(const SimConfig& config, std::ostream& log);
int cmd_simulate(const SimConfig& config, std::ostream& log);
// Uses the config embedded in the records file unless one is given.
int cmd_analyze(const std::string& records_path, const SimConfig* config, std::ostream& log);
int cmd_verify(const SimConfig& config, std::ostream& log);
// Interval survival from both series as CSV: a,x,t,reflection,eigen,abs_diff.
int cmd_oracle(double a, int n_terms, std::ostream& out);

struct OracleAgreement {
    double max_abs_diff = 0.0;
    std::size_t cases = 0;
};

// Both interval series on x in {0.1..0.9}, 12 log-spaced t in [0.01, 4].
OracleAgreement dual_series_check(int n_terms = 200);

struct CubeCheckRow {
    double t = 0.0;
    double empirical = 0.0;
    double oracle = 0.0;
    double std_error = 0.0;
    bool within_3se = false;
};

// Sampler against the exact square law: unit square, start at the center.
std::vector<CubeCheckRow> sampler_cube_check(std::int64_t n_paths, std::uint64_t seed, int workers);

// Full command line: subcommand plus flags. Maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace flights::cli
