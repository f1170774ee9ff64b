#pragma once

// hardy_calc command line front end. Kept in a header so tests can drive run() directly.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <algorithm>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hardy/hardy.hpp"

#ifndef HARDY_DEFAULT_FIXTURES
#define HARDY_DEFAULT_FIXTURES "fixtures/corridors.json"
#endif

namespace hardy::cli {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string check;
    int d = 3;
    double alpha = 1.0;
    double a = 0.0;
    double s = 1.0;
    double p = 2.0;
    double q = 4.0;
    double t = 1.0;
    std::vector<double> r{0.0};
    double y = 1.0;
    std::optional<double> grid_min, grid_max;
    int grid_n = 512;
    std::string bands;  // "jmin:jmax"
    int steps = 32;
    std::string family = "gaussian";
    std::string multiplier = "riesz:0.8";
    std::string input;
    std::string out;
    std::string fixtures;
    int jobs = 1;
    bool freeze = false;

    Parameters params() const { return Parameters::make(d, alpha, a, s, p); }

    RadialGrid grid() const {
        const auto fallback = default_grid(d, grid_n);
        return make_grid(grid_min.value_or(fallback.r_min()), grid_max.value_or(fallback.r_max()), grid_n, d);
    }

    std::optional<BandRange> band_range() const {
        if (bands.empty()) return std::nullopt;
        const auto colon = bands.find(':');
        if (colon == std::string::npos) throw DomainError("--bands must look like jmin:jmax, got '" + bands + "'");
        try {
            return BandRange(std::stoi(bands.substr(0, colon)), std::stoi(bands.substr(colon + 1)));
        } catch (const std::invalid_argument&) {
            throw DomainError("--bands must look like jmin:jmax, got '" + bands + "'");
        }
    }

    std::string fixtures_path() const {
        if (const char* env = std::getenv("HARDY_CALC_FIXTURES"); env && *env) return env;
        if (!fixtures.empty()) return fixtures;
        return HARDY_DEFAULT_FIXTURES;
    }
};

enum ExitCode { kOk = 0, kFail = 1, kUsage = 2 };

namespace detail {

inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr std::string_view kConfigKeys[] = {
    "d", "alpha", "a", "s", "p", "q", "t", "r", "y", "grid-min", "grid-max", "grid-n", "bands", "steps",
    "family", "multiplier", "input", "out", "fixtures", "jobs", "freeze"};

/// Config file entries turned into leading "--key value" arguments, so later flags win.
inline std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DomainError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw DomainError("config file must hold a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, value] : doc.items()) {
        if (key == "schema_version") continue;
        if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
            throw DomainError("config file " + path + ": unknown field '" + key + "'");
        }
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_number()) {
            out.push_back(flag);
            out.push_back(value.is_number_integer() ? std::to_string(value.get<long long>()) : number(value.get<double>()));
        } else if (value.is_string()) {
            out.push_back(flag);
            out.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!item.is_number()) throw DomainError("config field '" + key + "' must be a list of numbers");
                joined += (joined.empty() ? "" : ",") + number(item.get<double>());
            }
            out.push_back(flag);
            out.push_back(joined);
        } else {
            throw DomainError("config field '" + key + "' has an unsupported type");
        }
    }
    return out;
}

inline void write_artifact(const RunConfig& cfg, const std::string& name, const std::string& content) {
    if (cfg.out.empty()) return;
    std::filesystem::create_directories(cfg.out);
    std::ofstream file(std::filesystem::path(cfg.out) / name);
    if (!file) throw DomainError("cannot write " + (std::filesystem::path(cfg.out) / name).string());
    file << content;
}

inline RadialFunction input_profile(const RunConfig& cfg) {
    if (cfg.input.empty()) return RadialFunction::sample(cfg.grid(), [](double r) { return std::exp(-r * r); });
    std::ifstream in(cfg.input);
    if (!in) throw DomainError("cannot read --input " + cfg.input);
    return read_csv(in, cfg.d);
}

inline std::function<std::complex<double>(double)> multiplier(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    double value = 0.0;
    if (colon != std::string::npos) {
        try {
            value = std::stod(spec.substr(colon + 1));
        } catch (const std::exception&) {
            throw DomainError("bad --multiplier '" + spec + "'");
        }
    }
    if (kind == "one") return [](double) { return std::complex<double>(1.0); };
    if (kind == "imaginary") return [value](double l) { return std::exp(std::complex<double>(0.0, value * std::log(l))); };
    if (kind == "riesz") {
        return [value](double l) { return std::complex<double>(l < 1.0 ? std::pow(1.0 - l, value) : 0.0); };
    }
    throw DomainError("unknown --multiplier '" + spec + "' (one, imaginary:tau, riesz:beta)");
}

inline VerificationReport run_check(const std::string& name, const RunConfig& cfg, CorridorStore& store) {
    const Parameters params = cfg.params();
    VerifyOptions options;
    options.grid = cfg.grid();
    options.n_steps = cfg.steps;
    options.bands = cfg.band_range();
    options.store = &store;
    options.freeze = cfg.freeze;
    const TrialFamily family = TrialFamily::parse(cfg.family);
    if (name == "hardy") return verify_hardy(family, params, options);
    if (name == "generalized-hardy") return verify_generalized_hardy(family, params, options);
    if (name == "norm-equivalence") return verify_norm_equivalence(family, params, options);
    if (name == "reverse-hardy") return verify_reverse_hardy(family, params, options);
    if (name == "bernstein") return verify_bernstein(family, params, cfg.p, cfg.q, options);
    if (name == "schur") return verify_schur(params);
    if (name == "heat-bounds") {
        HeatSampleOptions heat;
        heat.n_steps = cfg.steps;
        heat.grid = options.grid;
        return verify_heat_bounds_refined(params, heat);
    }
    if (name == "difference-bound") {
        DifferenceOptions diff;
        diff.t = cfg.t;
        diff.n_steps = cfg.steps;
        diff.grid = options.grid;
        return verify_difference_bound(params, diff, options);
    }
    throw DomainError("unknown check '" + name + "'; see list-checks");
}

inline int verdict_exit(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports) {
        if (r.verdict == Verdict::fail) return kFail;
    }
    return kOk;
}

}  // namespace detail

/// Execute a parsed configuration; artifacts go to out (stdout) and cfg.out.
inline int execute(const RunConfig& cfg, std::ostream& out) {
    const Parameters params = cfg.params();

    if (cfg.command == "constants") {
        json doc = {{"schema_version", kSchemaVersion},
                    {"d", cfg.d},
                    {"alpha", cfg.alpha},
                    {"a_star", critical_coupling(cfg.d, cfg.alpha)},
                    {"delta", params.delta},
                    {"riesz_c", riesz_constant(cfg.d, cfg.alpha)}};
        doc["hardy_c_p2"] = 2.0 < 2.0 * cfg.d / cfg.alpha ? json(lp_hardy_constant(cfg.d, cfg.alpha, 2.0)) : json(nullptr);
        doc["hardy_c_p"] = cfg.p < 2.0 * cfg.d / cfg.alpha ? json(lp_hardy_constant(cfg.d, cfg.alpha, cfg.p)) : json(nullptr);
        const std::string text = doc.dump(2) + "\n";
        out << text;
        detail::write_artifact(cfg, "constants.json", text);
        return kOk;
    }

    if (cfg.command == "kernel") {
        std::vector<KernelSample> rows;
        if (params.a == 0.0) {
            for (double r : cfg.r) {
                const auto env = heat_envelope(cfg.t, r, 0.0, r, params);
                rows.push_back({cfg.t, r, 0.0, r, free_heat_kernel(cfg.t, r, cfg.d, cfg.alpha), env.low, env.high});
            }
        } else {
            // columns are averages over |y| = y
            const auto column = hardy_kernel_column(cfg.t, cfg.y, params, cfg.steps, cfg.grid());
            const RadialInterpolant interp(column);
            for (double r : cfg.r) {
                const auto env = heat_envelope(cfg.t, r, cfg.y, std::abs(r - cfg.y), params);
                rows.push_back({cfg.t, r, cfg.y, std::abs(r - cfg.y), interp(r), env.low, env.high});
            }
        }
        std::ostringstream os;
        write_kernel_csv(os, rows);
        out << os.str();
        detail::write_artifact(cfg, "kernel.csv", os.str());
        return kOk;
    }

    if (cfg.command == "envelope") {
        json rows = json::array();
        for (double r : cfg.r) {
            const double dist = std::abs(r - cfg.y);
            json row = {{"t", cfg.t}, {"x", r}, {"y", cfg.y}, {"dist", dist},
                        {"envelope", finite_or_null(heat_envelope(cfg.t, r, cfg.y, dist, params).value)}};
            if (r > 0.0 && cfg.y > 0.0) {
                const auto lm = lm_bounds(cfg.t, r, cfg.y, dist, params);
                row["L"] = lm.L;
                row["M"] = lm.M;
            }
            rows.push_back(row);
        }
        const std::string text = json{{"schema_version", kSchemaVersion}, {"params", params_json(params)}, {"rows", rows}}.dump(2) + "\n";
        out << text;
        detail::write_artifact(cfg, "envelope.json", text);
        return kOk;
    }

    if (cfg.command == "semigroup") {
        const auto u = hardy_semigroup_apply(detail::input_profile(cfg), cfg.t, params, cfg.steps);
        std::ostringstream os;
        write_csv(os, u);
        out << os.str();
        detail::write_artifact(cfg, "semigroup.csv", os.str());
        return kOk;
    }

    if (cfg.command == "lp-decompose") {
        const auto bands = lp_decompose(detail::input_profile(cfg), params, cfg.band_range().value_or(BandRange{}), cfg.steps);
        std::ostringstream os;
        write_bands_csv(os, bands);
        out << os.str();
        detail::write_artifact(cfg, "bands.csv", os.str());
        return kOk;
    }

    if (cfg.command == "square-function") {
        const auto sf = square_function(detail::input_profile(cfg), cfg.s, params, cfg.band_range().value_or(BandRange{}), cfg.steps);
        std::ostringstream os;
        write_csv(os, sf);
        out << os.str();
        std::cerr << "tail " << detail::number(sf.meta.at("tail")) << '\n';
        detail::write_artifact(cfg, "square_function.csv", os.str());
        return kOk;
    }

    if (cfg.command == "hormander-norm") {
        const auto result = hormander_condition_norm(detail::multiplier(cfg.multiplier), cfg.s);
        const std::string text = json{{"schema_version", kSchemaVersion}, {"multiplier", cfg.multiplier}, {"s", cfg.s},
                                      {"sup", result.sup}, {"t", result.t}, {"norms", result.norms}}
                                     .dump(2) + "\n";
        out << text;
        detail::write_artifact(cfg, "hormander.json", text);
        return kOk;
    }

    if (cfg.command == "list-checks") {
        for (const auto& c : check_registry()) out << c.name << '\t' << c.summary << '\n';
        return kOk;
    }

    if (cfg.command == "verify" || cfg.command == "verify-all") {
        CorridorStore store = CorridorStore::load(cfg.fixtures_path());
        std::vector<std::string> names;
        if (cfg.command == "verify") {
            names.push_back(cfg.check);
        } else {
            for (const auto& c : check_registry()) names.push_back(c.name);
        }
        for (const auto& n : names) {
            bool known = false;
            for (const auto& c : check_registry()) known |= c.name == n;
            if (!known) throw DomainError("unknown check '" + n + "'; see list-checks");
        }
        std::vector<VerificationReport> reports(names.size());
        // up to --jobs checks at a time; results kept in registry order
        const std::size_t jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
        for (std::size_t start = 0; start < names.size(); start += jobs) {
            std::vector<std::future<VerificationReport>> running;
            for (std::size_t i = start; i < std::min(names.size(), start + jobs); ++i) {
                running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                             [&, i] { return detail::run_check(names[i], cfg, store); }));
            }
            for (std::size_t k = 0; k < running.size(); ++k) reports[start + k] = running[k].get();
        }
        json doc;
        if (cfg.command == "verify") {
            doc = to_json(reports.front());
        } else {
            json all = json::array();
            for (const auto& r : reports) all.push_back(to_json(r));
            doc = {{"schema_version", kSchemaVersion}, {"reports", all}};
        }
        const std::string text = doc.dump(2) + "\n";
        out << text;
        detail::write_artifact(cfg, cfg.command == "verify" ? cfg.check + ".json" : "verify_all.json", text);
        if (cfg.freeze && store.dirty()) store.save(cfg.fixtures_path());
        if (!cfg.out.empty()) {
            // wall-clock data lives here so the report files stay byte-identical across runs
            const auto now = std::chrono::system_clock::now();
            json meta = {{"schema_version", kSchemaVersion}, {"command", cfg.command}, {"fixtures", cfg.fixtures_path()},
                         {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()}};
            detail::write_artifact(cfg, "run_metadata.json", meta.dump(2) + "\n");
        }
        return detail::verdict_exit(reports);
    }

    throw DomainError("unknown command '" + cfg.command + "'");
}

/// Parse argv (config file first, then flags) and execute.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig cfg;
    CLI::App app{"hardy_calc: heat kernels, Littlewood-Paley calculus and inequality checks for (-Delta)^{alpha/2} + a|x|^{-alpha}"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_path;

    app.add_option("--d", cfg.d, "dimension");
    app.add_option("--alpha", cfg.alpha, "order alpha in (0, min(2, d))");
    app.add_option("--a", cfg.a, "coupling a >= a_*");
    app.add_option("--s", cfg.s, "Sobolev order s in (0, 2]");
    app.add_option("--p", cfg.p, "Lebesgue exponent p");
    app.add_option("--q", cfg.q, "target exponent q (bernstein)");
    app.add_option("--t", cfg.t, "time");
    app.add_option("--r", cfg.r, "radii, comma separated")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--y", cfg.y, "|y| for kernel columns and envelopes");
    app.add_option("--grid-min", cfg.grid_min, "smallest grid radius");
    app.add_option("--grid-max", cfg.grid_max, "largest grid radius");
    app.add_option("--grid-n", cfg.grid_n, "grid points");
    app.add_option("--bands", cfg.bands, "band range jmin:jmax");
    app.add_option("--steps", cfg.steps, "Strang steps");
    app.add_option("--family", cfg.family, "trial family: gaussian, plateau, power_tail:e:c, near_extremal:eps");
    app.add_option("--multiplier", cfg.multiplier, "hormander-norm multiplier: one, imaginary:tau, riesz:beta");
    app.add_option("--input", cfg.input, "input profile CSV (r,value); defaults to exp(-r^2)");
    app.add_option("--out", cfg.out, "artifact directory");
    app.add_option("--fixtures", cfg.fixtures, "frozen corridor file (HARDY_CALC_FIXTURES overrides)");
    app.add_option("--jobs", cfg.jobs, "checks run in parallel");
    app.add_option("--config", config_path, "JSON config; flags override it");
    app.add_flag("--freeze", cfg.freeze, "write missing corridors to the fixtures file");

    for (const char* name : {"constants", "kernel", "envelope", "semigroup", "lp-decompose", "square-function",
                             "hormander-norm", "verify-all", "list-checks"}) {
        app.add_subcommand(name)->fallthrough();
    }
    auto* verify = app.add_subcommand("verify", "run one check")->fallthrough();
    verify->add_option("check", cfg.check, "check name (see list-checks)")->required();

    std::vector<std::string> forward(argv + 1, argv + argc);
    std::vector<std::string> args;
    try {
        // the config file is spliced in front of the flags so that flags win
        for (std::size_t i = 0; i < forward.size(); ++i) {
            if (forward[i] == "--config" && i + 1 < forward.size()) config_path = forward[i + 1];
            if (forward[i].rfind("--config=", 0) == 0) config_path = forward[i].substr(9);
        }
        std::vector<std::string> merged;
        if (!config_path.empty()) merged = detail::config_arguments(config_path);
        merged.insert(merged.end(), forward.begin(), forward.end());
        args.assign(merged.rbegin(), merged.rend());  // CLI11 takes them reversed
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    try {
        return execute(cfg, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kFail;
    }
}

}  // namespace hardy::cli
