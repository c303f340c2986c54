// Acceptance run: evaluates every criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exits 0 only when all pass.
#include "flights/analysis.hpp"
#include "flights/commands.hpp"
#include "flights/config.hpp"
#include "flights/flight.hpp"
#include "flights/io.hpp"
#include "flights/whitney.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace flights;
namespace fs = std::filesystem;

namespace {

const double kKochDimension = std::log(4.0) / std::log(3.0);

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_ = Clock::now();
};

struct Tally {
    int passed = 0;
    int failed = 0;
    void line(int id, const std::string& name, bool ok, const std::string& detail) {
        (ok ? passed : failed)++;
        std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << std::endl;
    }
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

struct Campaign {
    std::string label;
    ExponentFit time_fit;
    ExponentFit length_fit;
    double seconds = 0.0;
    std::size_t censored = 0;
};

template <int Dim>
Campaign run_exponent_campaign(const std::string& label, const DomainSpec& spec, double eps, std::int64_t n,
                               std::uint64_t seed, int workers, std::vector<WhitneyAudit>& audits) {
    Stopwatch clock;
    const auto domain = make_domain<Dim>(spec);
    const int kmin = int(std::floor(std::log2(eps))) - 3;
    const auto dec = decompose(domain, kmin);
    audits.push_back(audit_whitney(dec));
    const double r = dec.inradius_cap();
    const auto policy = StepPolicy::defaults(eps, r);
    const auto records = run_campaign(domain, dec, eps, policy, n, seed, workers);
    const auto samples = to_samples(records);

    Campaign c;
    c.label = label;
    const auto curve = empirical_survival(samples, {eps * eps, policy.t_max, 16}, eps, policy.t_max);
    c.time_fit = fit_exponent(curve, theorem_windows(eps, r).middle);
    c.length_fit = fit_length_exponent(samples, eps, default_length_window(eps, r));
    c.censored = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.censored; });
    c.seconds = clock.seconds();
    return c;
}

std::string describe(const ExponentFit& f) {
    return fmt(f.exponent) + " (90% CI " + fmt(f.ci_90.first) + ".." + fmt(f.ci_90.second) + ", window [" +
           fmt(f.window.lo) + ", " + fmt(f.window.hi) + "])";
}

template <int Dim>
DimensionEstimate audited_dimension(const DomainSpec& spec, int kmin, std::vector<WhitneyAudit>& audits) {
    const auto dec = decompose(make_domain<Dim>(spec), kmin);
    audits.push_back(audit_whitney(dec));
    return whitney_dimension(layer_counts(dec));
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int workers = int(std::max(1u, std::thread::hardware_concurrency()));
    std::string scratch = (fs::temp_directory_path() / "flights_acceptance").string();
    std::uint64_t seed = 20240601;
    app.add_option("--workers", workers, "worker threads for the campaigns")->check(CLI::PositiveNumber);
    app.add_option("--scratch", scratch, "directory for CLI outputs");
    app.add_option("--seed", seed, "master seed");
    CLI11_PARSE(app, argc, argv);

    Tally tally;
    std::vector<WhitneyAudit> audits;
    try {
        {
            Stopwatch clock;
            const auto agreement = cli::dual_series_check();
            const double s = clock.seconds();
            tally.line(1, "oracle integrity", agreement.max_abs_diff <= 1e-10 && s < 1.0,
                       "max |reflection - eigen| = " + fmt(agreement.max_abs_diff) + " over " +
                           std::to_string(agreement.cases) + " (x, t) points (<= 1e-10), " + fmt(s, 3) +
                           " s (< 1 s)");
        }
        {
            Stopwatch clock;
            const auto rows = cli::sampler_cube_check(100000, seed, workers);
            const double s = clock.seconds();
            bool ok = s < 300.0;
            std::string detail;
            for (const auto& r : rows) {
                ok &= r.within_3se;
                detail += "t=" + fmt(r.t) + ": " + fmt(r.empirical, 5) + " vs " + fmt(r.oracle, 5) + " (3se " +
                          fmt(3 * r.std_error, 2) + "); ";
            }
            tally.line(2, "sampler vs cube law", ok, detail + fmt(s, 3) + " s (< 300 s)");
        }

        const Campaign sq = run_exponent_campaign<2>("square", testing::square(), std::ldexp(1.0, -6), 100000, seed,
                                                     workers, audits);
        tally.line(3, "smooth-boundary exponent", sq.time_fit.exponent >= 0.85 && sq.time_fit.exponent <= 1.15 &&
                                                      sq.seconds < 900.0,
                   "alpha = " + describe(sq.time_fit) + ", target [0.85, 1.15]; " + std::to_string(sq.censored) +
                       " censored; " + fmt(sq.seconds, 3) + " s (< 900 s)");

        const Campaign kc = run_exponent_campaign<2>("koch(6)", testing::koch(6), std::ldexp(1.0, -7), 200000, seed,
                                                     workers, audits);
        tally.line(4, "fractal exponent", std::abs(kc.time_fit.exponent - kKochDimension) <= 0.2 && kc.seconds < 3600.0,
                   "alpha = " + describe(kc.time_fit) + ", target " + fmt(kKochDimension, 6) + " +- 0.2; " +
                       fmt(kc.seconds, 3) + " s (< 3600 s)");

        const bool len_sq = std::abs(sq.length_fit.exponent - 1.0) <= 0.15;
        const bool len_kc = std::abs(kc.length_fit.exponent - kKochDimension) <= 0.2;
        tally.line(5, "length law", len_sq && len_kc,
                   "square beta = " + describe(sq.length_fit) + " (1 +- 0.15); koch beta = " +
                       describe(kc.length_fit) + " (" + fmt(kKochDimension, 6) + " +- 0.2)");

        {
            const auto d_sq = audited_dimension<2>(testing::square(), -16, audits);
            // Finest generation whose cubes sit above the prefractal edge length 3^-7.
            const int koch_kmin = int(std::ceil(std::log2(std::pow(3.0, -7) / std::sqrt(2.0))));
            const auto d_k7 = audited_dimension<2>(testing::koch(7), koch_kmin, audits);
            const auto d_box = audited_dimension<3>(testing::box3d(), -9, audits);
            audits.push_back(audit_whitney(decompose(make_domain<2>(testing::disk()), -10)));
            std::size_t bad = 0, cubes = 0;
            for (const auto& a : audits) bad += !a.ok(), cubes += a.cubes;
            const bool ok = bad == 0 && std::abs(d_sq.dimension - 1.0) <= 0.05 &&
                            std::abs(d_k7.dimension - 1.26) <= 0.05 && std::abs(d_box.dimension - 2.0) <= 0.05;
            tally.line(6, "whitney machinery", ok,
                       std::to_string(audits.size() - bad) + "/" + std::to_string(audits.size()) +
                           " decompositions audited clean (" + std::to_string(cubes) + " cubes); dimension square " +
                           fmt(d_sq.dimension) + " (1 +- 0.05, kmin -16), koch(7) " + fmt(d_k7.dimension) +
                           " (1.26 +- 0.05, kmin " + std::to_string(koch_kmin) + "), box3d " +
                           fmt(d_box.dimension) + " (2 +- 0.05, kmin -9)");
        }

        {
            Stopwatch clock;
            std::string detail;
            bool ok = true;
            for (const auto& spec : {testing::square(), testing::koch(6)}) {
                const auto domain = make_domain<2>(spec);
                const auto dec = decompose(domain, -10);
                const double r = dec.inradius_cap();
                const auto points = testing::near_boundary_points(domain, 50, 1e-3, 0.05, seed);
                const auto report =
                    estimate_delta_regularity(domain, points, 2000, StepPolicy::defaults(1.0 / 128, r), seed, r);
                ok &= report.lower_bound > 0.05;
                detail += domain.name() + " L = " + fmt(report.lower_bound) + "; ";
            }
            const double s = clock.seconds();
            tally.line(7, "delta regularity", ok && s < 300.0, detail + "(> 0.05), " + fmt(s, 3) + " s (< 300 s)");
        }

        {
            const fs::path root(scratch);
            fs::remove_all(root);
            fs::create_directories(root);
            const std::vector<std::string> files{"cubes.csv",  "layer_counts.csv", "hypothesis.json", "flights.jsonl",
                                                 "survival.csv", "fits.json",      "report.json",     "report.txt"};
            std::ostringstream sink;
            bool ok = true;
            for (int w : {1, 4, 8}) {
                const std::string dir = (root / ("w" + std::to_string(w))).string();
                for (const char* cmd : {"decompose", "simulate", "analyze"}) {
                    const int code = cli::run({cmd, "--preset", "koch-quick", "--flights", "20000", "--workers",
                                               std::to_string(w), "--output-dir", dir},
                                              sink, sink);
                    ok &= code == cli::kPass || (code == cli::kCheckFailed && std::string(cmd) == "analyze");
                }
            }
            std::size_t identical = 0;
            for (const auto& f : files) {
                const std::string ref = slurp(root / "w1" / f);
                const bool same = !ref.empty() && ref == slurp(root / "w4" / f) && ref == slurp(root / "w8" / f);
                identical += same;
                ok &= same;
            }
            tally.line(8, "determinism", ok,
                       std::to_string(identical) + "/" + std::to_string(files.size()) +
                           " output files byte-identical across workers {1, 4, 8}");
        }
    } catch (const std::exception& e) {
        std::cout << "ERROR  acceptance run aborted: " << e.what() << std::endl;
        return 3;
    }

    std::cout << tally.passed << " passed, " << tally.failed << " failed" << std::endl;
    return tally.failed == 0 ? 0 : 1;
}
