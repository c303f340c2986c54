#include "flights/commands.hpp"

#include "flights/errors.hpp"
#include "flights/io.hpp"
#include "flights/oracles.hpp"
#include "flights/parallel.hpp"
#include "flights/whitney.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace flights::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const SimConfig& config, const std::string& name) {
    fs::create_directories(config.output_dir);
    const fs::path path = fs::path(config.output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_json_file(const SimConfig& config, const std::string& name, const json& body) {
    auto out = open_output(config, name);
    out << body.dump(2) << '\n';
}

template <int Dim>
struct Prepared {
    Domain<Dim> domain;
    WhitneyDecomposition<Dim> decomposition;
};

template <int Dim>
Prepared<Dim> prepare(const SimConfig& config) {
    Domain<Dim> domain = make_domain<Dim>(config.domain);
    auto dec = decompose(domain, config.resolved_min_generation());
    return {std::move(domain), std::move(dec)};
}

template <int Dim>
int decompose_impl(const SimConfig& config, std::ostream& log) {
    const json prov = provenance_json(config);
    const auto [domain, dec] = prepare<Dim>(config);
    {
        auto out = open_output(config, "cubes.csv");
        write_cubes_csv(out, dec, prov);
    }
    const auto counts = layer_counts(dec);
    {
        auto out = open_output(config, "layer_counts.csv");
        write_layer_counts_csv(out, counts, prov);
    }
    HypothesisReport hypothesis;
    try {
        hypothesis = check_self_similarity_hypothesis(dec, domain);
    } catch (const PreconditionError& e) {
        hypothesis.unavailable = e.what();
    }
    const json hyp = to_json(hypothesis);
    write_json_file(config, "hypothesis.json",
                    {{"format_version", kFormatVersion}, {"config", prov}, {"r_omega", dec.inradius_cap()},
                     {"cubes", dec.size()}, {"hypothesis", hyp}});
    log << "decompose: " << dec.size() << " cubes over " << counts.size() << " generations, R_Omega = "
        << format_double(dec.inradius_cap()) << '\n';
    return kPass;
}

template <int Dim>
int simulate_impl(const SimConfig& config, std::ostream& log) {
    const auto [domain, dec] = prepare<Dim>(config);
    const StepPolicy policy = config.resolve_policy(dec.inradius_cap());
    const auto records =
        run_campaign(domain, dec, config.epsilon, policy, config.n_flights, config.master_seed, config.workers);
    auto out = open_output(config, "flights.jsonl");
    write_flights_jsonl(out, records, provenance_json(config));
    const auto censored = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.censored; });
    log << "simulate: " << records.size() << " flights, " << censored << " censored\n";
    return kPass;
}

template <int Dim>
int analyze_impl(const std::vector<FlightSample>& samples, const SimConfig& config, std::ostream& log) {
    const json prov = provenance_json(config);
    const auto [domain, dec] = prepare<Dim>(config);
    const double r_omega = dec.inradius_cap();
    const StepPolicy policy = config.resolve_policy(r_omega);
    const double eps = config.epsilon;
    const FitOptions options{config.bootstrap_resamples, config.master_seed ^ 0xb0075ull};

    const SurvivalCurve curve =
        empirical_survival(samples, {eps * eps, policy.t_max, config.points_per_decade}, eps, policy.t_max);
    NestedWindows windows = theorem_windows(eps, r_omega);
    if (config.time_window) windows.middle = *config.time_window;

    TheoremInputs in;
    in.domain_name = domain.name();
    in.dimension = Dim;
    in.epsilon = eps;
    in.r_omega = r_omega;
    in.known_boundary_dimension = domain.known_boundary_dimension();
    in.target_dimension = config.target_dimension;
    in.curve = curve;
    in.windows = windows;
    json fit_notes = json::object();
    for (const auto& [name, w] : {std::pair{"narrow", windows.narrow}, std::pair{"middle", windows.middle},
                                  std::pair{"wide", windows.wide}}) {
        try {
            in.time_fits.push_back(fit_exponent(curve, w, options));
        } catch (const FitError& e) {
            if (std::string(name) == "middle") throw;
            fit_notes[name] = e.what();
            ExponentFit missing;
            missing.window = w;
            missing.exponent = std::nan("");
            in.time_fits.push_back(missing);
        }
    }
    in.length_fit = fit_length_exponent(samples, eps, config.length_window.value_or(default_length_window(eps, r_omega)),
                                        options);
    in.dimension_estimate = whitney_dimension(layer_counts(dec));
    try {
        in.hypothesis = check_self_similarity_hypothesis(dec, domain);
    } catch (const PreconditionError& e) {
        in.hypothesis.unavailable = e.what();
    }
    in.layer_size = [&dec](double r) { return layer_size(dec, r); };
    const VerificationReport report = theorem_report(in);

    {
        auto out = open_output(config, "survival.csv");
        write_survival_csv(out, curve, prov);
    }
    json fits{{"format_version", kFormatVersion},
              {"config", prov},
              {"time", json::object()},
              {"length", to_json(report.length_fit)},
              {"whitney_dimension", to_json(in.dimension_estimate)},
              {"notes", fit_notes}};
    for (const auto& [name, f] : report.time_fits) fits["time"][name] = to_json(f);
    write_json_file(config, "fits.json", fits);
    json rep = to_json(report);
    write_json_file(config, "report.json", {{"format_version", kFormatVersion}, {"config", prov}, {"report", rep}});
    {
        auto out = open_output(config, "report.txt");
        out << "format_version " << kFormatVersion << "\nconfig " << prov.dump() << "\n\n" << to_text(report);
    }
    log << to_text(report);
    return report.pass ? kPass : kCheckFailed;
}

template <class F>
int dispatch(const SimConfig& config, F&& f) {
    switch (config.domain.dimension()) {
    case 2: return f(std::integral_constant<int, 2>{});
    case 3: return f(std::integral_constant<int, 3>{});
    default: throw ConfigError("unsupported dimension");
    }
}

SimConfig config_from_provenance(json prov) {
    prov.erase("format_version");
    return config_from_json(prov);
}

} // namespace

int cmd_decompose(const SimConfig& config, std::ostream& log) {
    config.validate();
    return dispatch(config, [&](auto d) { return decompose_impl<decltype(d)::value>(config, log); });
}

int cmd_simulate(const SimConfig& config, std::ostream& log) {
    config.validate();
    return dispatch(config, [&](auto d) { return simulate_impl<decltype(d)::value>(config, log); });
}

int cmd_analyze(const std::string& records_path, const SimConfig* config, std::ostream& log) {
    std::ifstream in(records_path);
    if (!in) throw ConfigError("cannot open records file '" + records_path + "'");
    const FlightFile file = read_flights_jsonl(in);
    SimConfig cfg = config ? *config : config_from_provenance(file.config);
    if (!config) {
        // Outputs go next to the records unless a config says otherwise.
        cfg.output_dir = fs::path(records_path).parent_path().string();
        if (cfg.output_dir.empty()) cfg.output_dir = ".";
    }
    cfg.validate();
    if (file.dimension != cfg.domain.dimension())
        throw ConfigError("records have dimension " + std::to_string(file.dimension) + " but the domain has " +
                          std::to_string(cfg.domain.dimension()));
    return dispatch(cfg, [&](auto d) { return analyze_impl<decltype(d)::value>(file.samples, cfg, log); });
}

OracleAgreement dual_series_check(int n_terms) {
    OracleAgreement agreement;
    for (int i = 1; i <= 9; ++i) {
        for (int k = 0; k < 12; ++k) {
            const double t = 0.01 * std::pow(400.0, k / 11.0);
            const IntervalSurvivalQuery q{0.1 * i, 1.0, t};
            const double diff = std::abs(interval_survival_reflection(q, n_terms) - interval_survival_eigen(q, n_terms));
            agreement.max_abs_diff = std::max(agreement.max_abs_diff, diff);
            ++agreement.cases;
        }
    }
    return agreement;
}

std::vector<CubeCheckRow> sampler_cube_check(std::int64_t n_paths, std::uint64_t seed, int workers) {
    DomainSpec spec;
    spec.shape = shapes::Square{1.0};
    const Domain<2> square = make_domain<2>(spec);
    StepPolicy policy;
    policy.c_step = 0.1;
    policy.dt_max = 0.0025;
    policy.delta_abs = 1e-4;
    policy.t_max = 0.6;
    policy.validate();

    const std::vector<double> times{0.05, 0.1, 0.2, 0.5};
    std::vector<double> tau(static_cast<std::size_t>(n_paths));
    const Point<2> center(0.5, 0.5);
    parallel_for(tau.size(), workers, [&](std::size_t i) {
        std::mt19937_64 rng = flight_stream(seed, i);
        tau[i] = run_path(square, center, policy, rng).tau;
    });

    std::vector<CubeCheckRow> rows;
    for (double t : times) {
        CubeCheckRow row;
        row.t = t;
        row.empirical = double(std::count_if(tau.begin(), tau.end(), [t](double v) { return v > t; })) / tau.size();
        row.oracle = cube_survival(1.0, 2, t);
        row.std_error = std::sqrt(row.oracle * (1.0 - row.oracle) / tau.size());
        row.within_3se = std::abs(row.empirical - row.oracle) <= 3.0 * row.std_error;
        rows.push_back(row);
    }
    return rows;
}

int cmd_oracle(double a, int n_terms, std::ostream& out) {
    out << "a,x,t,reflection,eigen,abs_diff\n";
    for (int i = 1; i <= 9; ++i) {
        for (int k = 0; k < 12; ++k) {
            const double t = a * a * 0.01 * std::pow(400.0, k / 11.0);
            const IntervalSurvivalQuery q{0.1 * i * a, a, t};
            const double r = interval_survival_reflection(q, n_terms);
            const double e = interval_survival_eigen(q, n_terms);
            out << format_double(a) << ',' << format_double(q.x) << ',' << format_double(t) << ','
                << format_double(r) << ',' << format_double(e) << ',' << format_double(std::abs(r - e)) << '\n';
        }
    }
    return kPass;
}

int cmd_verify(const SimConfig& config, std::ostream& log) {
    const auto started = std::chrono::steady_clock::now();
    bool ok = true;

    const OracleAgreement agreement = dual_series_check();
    const bool series_ok = agreement.max_abs_diff <= 1e-10;
    log << "oracle: dual-series max |diff| = " << format_double(agreement.max_abs_diff) << " over "
        << agreement.cases << " cases -> " << (series_ok ? "PASS" : "FAIL") << '\n';
    ok &= series_ok;

    bool cube_ok = true;
    for (const auto& row : sampler_cube_check(config.oracle_paths, config.master_seed, config.workers)) {
        log << "oracle: t = " << format_double(row.t) << " empirical " << format_double(row.empirical) << " exact "
            << format_double(row.oracle) << " (3 se = " << format_double(3 * row.std_error) << ") -> "
            << (row.within_3se ? "PASS" : "FAIL") << '\n';
        cube_ok &= row.within_3se;
    }
    ok &= cube_ok;

    cmd_decompose(config, log);
    const bool whitney_ok = dispatch(config, [&](auto d) {
        constexpr int Dim = decltype(d)::value;
        const auto [domain, dec] = prepare<Dim>(config);
        const WhitneyAudit audit = audit_whitney(dec);
        log << "whitney: " << audit.cubes << " cubes, max neighbors " << audit.max_neighbors << ", max side ratio "
            << audit.max_side_ratio << " -> " << (audit.ok() ? "PASS" : "FAIL") << '\n';
        return audit.ok() ? 1 : 0;
    });
    ok &= whitney_ok != 0;

    cmd_simulate(config, log);
    const int analyzed = cmd_analyze((fs::path(config.output_dir) / "flights.jsonl").string(), &config, log);
    ok &= analyzed == kPass;

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log << "verify: " << (ok ? "PASS" : "FAIL") << " in " << format_double(std::round(seconds * 10) / 10) << " s\n";
    return ok ? kPass : kCheckFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Brownian flight time and length statistics near rough boundaries", "flights"};
    app.require_subcommand(1);

    std::string config_path, preset_name, output_dir, records_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::int64_t> n_flights;
    double oracle_a = 1.0;
    int oracle_terms = 64;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--preset", preset_name, "named preset (square-quick, square-full, koch-quick, koch-full)");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--output-dir", output_dir, "output directory");
        sub->add_option("--flights", n_flights, "number of flights");
    };
    auto* decompose_cmd = app.add_subcommand("decompose", "Whitney decomposition, layer counts, hypothesis check");
    auto* simulate_cmd = app.add_subcommand("simulate", "run a flight campaign");
    auto* analyze_cmd = app.add_subcommand("analyze", "survival curve, exponent fits, theorem report");
    auto* verify_cmd = app.add_subcommand("verify", "oracle self-tests, then decompose, simulate and analyze");
    auto* oracle_cmd = app.add_subcommand("oracle", "interval exit-time survival table as CSV");
    for (auto* sub : {decompose_cmd, simulate_cmd, analyze_cmd, verify_cmd}) add_common(sub);
    analyze_cmd->add_option("--records", records_path, "flights.jsonl (default <output-dir>/flights.jsonl)");
    oracle_cmd->add_option("--a", oracle_a, "interval length")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--terms", oracle_terms, "series terms")->check(CLI::Range(1, 100000));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_a, oracle_terms, out);

        const bool have_file = !config_path.empty();
        SimConfig config = preset_name.empty() ? SimConfig{} : preset(preset_name);
        if (have_file) config = load_config(config_path, config);
        if (seed) config.master_seed = *seed;
        if (workers) config.workers = *workers;
        if (n_flights) config.n_flights = *n_flights;
        if (!output_dir.empty()) config.output_dir = output_dir;
        config.validate();
        const bool explicit_config = have_file || !preset_name.empty();

        if (decompose_cmd->parsed()) return cmd_decompose(config, out);
        if (simulate_cmd->parsed()) return cmd_simulate(config, out);
        if (verify_cmd->parsed()) {
            if (!explicit_config) throw ConfigError("verify needs --preset or --config");
            return cmd_verify(config, out);
        }
        if (analyze_cmd->parsed()) {
            if (records_path.empty()) records_path = (fs::path(config.output_dir) / "flights.jsonl").string();
            return cmd_analyze(records_path, explicit_config ? &config : nullptr, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const PreconditionError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kUsageError;
    } catch (const FitError& e) {
        err << "fit failed: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kUsageError;
}

} // namespace flights::cli
