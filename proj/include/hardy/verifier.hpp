#pragma once

// Measured checks of the inequalities satisfied by L_{a,alpha} on families of radial
// trial profiles. Constants hidden in the inequalities are unknown, so a check
// measures lhs/rhs ratios and compares them with a corridor frozen on a first run.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <nlohmann/json.hpp>

#include "hardy/error.hpp"
#include "hardy/heat_kernels.hpp"
#include "hardy/radial.hpp"
#include "hardy/special_functions.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// trial families

enum class TrialKind { gaussian_bump, plateau_bump, power_tail, near_extremal };

/// Smooth plateau: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
inline double smooth_plateau(double r) {
    auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return h(2.0 - r) / (h(2.0 - r) + h(r - 1.0));
}

inline std::vector<double> dyadic_scales(int lo, int hi) {
    std::vector<double> out;
    for (int k = lo; k <= hi; ++k) out.push_back(std::ldexp(1.0, k));
    return out;
}

struct TrialFamily {
    TrialKind kind = TrialKind::gaussian_bump;
    std::vector<double> scales = dyadic_scales(-2, 2);
    double exponent = 0.0;  // power_tail: r^exponent near the origin
    double cutoff = 1.0;    // power_tail: plateau radius
    double epsilon = 0.1;   // near_extremal: distance to the Hardy extremal power

    static TrialFamily gaussian(std::vector<double> scales = dyadic_scales(-2, 2)) {
        return {TrialKind::gaussian_bump, std::move(scales)};
    }
    static TrialFamily plateau(std::vector<double> scales = dyadic_scales(-2, 2)) {
        return {TrialKind::plateau_bump, std::move(scales)};
    }
    static TrialFamily power_tail(double exponent, double cutoff, std::vector<double> scales = {1.0}) {
        return {TrialKind::power_tail, std::move(scales), exponent, cutoff};
    }
    static TrialFamily near_extremal(double epsilon, std::vector<double> scales = {1.0}) {
        TrialFamily f{TrialKind::near_extremal, std::move(scales)};
        f.epsilon = epsilon;
        return f;
    }

    /// "gaussian", "plateau", "power_tail:<exponent>:<cutoff>" or "near_extremal:<epsilon>".
    static TrialFamily parse(const std::string& spec) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
        detail::require(!parts.empty(), "empty trial family");
        auto number = [&](std::size_t i, double fallback) {
            if (i >= parts.size()) return fallback;
            try {
                return std::stod(parts[i]);
            } catch (const std::exception&) {
                throw DomainError("bad number in trial family '" + spec + "'");
            }
        };
        if (parts[0] == "gaussian") return gaussian();
        if (parts[0] == "plateau") return plateau();
        if (parts[0] == "power_tail") return power_tail(number(1, 0.5), number(2, 1.0));
        if (parts[0] == "near_extremal") return near_extremal(number(1, 0.1));
        throw DomainError("unknown trial family '" + spec + "'");
    }

    std::string name() const {
        switch (kind) {
            case TrialKind::gaussian_bump: return "gaussian";
            case TrialKind::plateau_bump: return "plateau";
            case TrialKind::power_tail: return "power_tail";
            case TrialKind::near_extremal: return "near_extremal";
        }
        return "?";
    }

    /// Exponent of the near_extremal power, -d/p + alpha/2 + epsilon.
    static double extremal_exponent(const Parameters& params, double epsilon) {
        return -params.d / params.p + 0.5 * params.alpha + epsilon;
    }

    /// Member at the given scale, r -> profile(r / scale), sampled on grid.
    RadialFunction member(const RadialGrid& grid, double scale, const Parameters& params) const {
        detail::require(scale > 0.0, "trial scale must be positive");
        std::function<double(double)> profile;
        switch (kind) {
            case TrialKind::gaussian_bump: profile = [](double r) { return std::exp(-r * r); }; break;
            case TrialKind::plateau_bump: profile = smooth_plateau; break;
            case TrialKind::power_tail: {
                const double e = exponent, c = cutoff;
                profile = [e, c](double r) { return std::pow(r, e) * smooth_plateau(r / c); };
                break;
            }
            case TrialKind::near_extremal: {
                const double e = extremal_exponent(params, epsilon);
                profile = [e](double r) { return std::pow(r, e) * smooth_plateau(r); };
                break;
            }
        }
        auto f = RadialFunction::sample(grid, [&](double r) { return profile(r / scale); });
        if (std::abs(f.values.back()) > 1e-8 * f.max_abs()) {
            throw DomainError("trial " + name() + " at scale " + std::to_string(scale) + " does not fit the grid");
        }
        return f;
    }
};

// ---------------------------------------------------------------------------
// reports and frozen corridors

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct TrialRecord {
    double scale = 1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::map<std::string, double> extra;  // e.g. band exponent j or sweep epsilon
};

struct VerificationReport {
    std::string check;
    Parameters params;
    std::vector<TrialRecord> trials;
    double corridor_lo = 0.0;
    double corridor_hi = HUGE_VAL;
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::string> notes;

    void note(std::string text) { notes.push_back(std::move(text)); }

    /// Downgrade a pass to the given verdict; fail always wins.
    void downgrade(Verdict v) {
        if (verdict == Verdict::fail) return;
        if (v == Verdict::fail || verdict == Verdict::pass) verdict = v;
    }
};

inline nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json params_json(const Parameters& p) {
    return {{"d", p.d}, {"alpha", p.alpha}, {"a", p.a}, {"delta", p.delta}, {"s", p.s}, {"p", p.p}};
}

inline nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : r.trials) {
        nlohmann::json item = {{"scale", t.scale}, {"lhs", finite_or_null(t.lhs)}, {"rhs", finite_or_null(t.rhs)},
                               {"ratio", finite_or_null(t.ratio)}};
        for (const auto& [k, v] : t.extra) item[k] = finite_or_null(v);
        trials.push_back(std::move(item));
    }
    std::string notes;
    for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
    return {{"schema_version", kSchemaVersion},
            {"check", r.check},
            {"params", params_json(r.params)},
            {"trials", std::move(trials)},
            {"corridor", {finite_or_null(r.corridor_lo), finite_or_null(r.corridor_hi)}},
            {"verdict", to_string(r.verdict)},
            {"notes", notes}};
}

/// Versioned store of frozen corridors, keyed by check and configuration.
class CorridorStore {
public:
    static constexpr double kSlack = 1.1;  // widening applied when a corridor is frozen

    CorridorStore() = default;

    static CorridorStore load(const std::string& path) {
        CorridorStore store;
        store.path_ = path;
        std::ifstream in(path);
        if (!in) return store;
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("fixtures file " + path + " is not valid JSON: " + e.what());
        }
        if (doc.contains("schema_version") && doc["schema_version"].get<int>() != kSchemaVersion) {
            throw DomainError("fixtures file " + path + " has an unsupported schema_version");
        }
        if (doc.contains("corridors")) {
            for (const auto& [key, value] : doc["corridors"].items()) {
                const double lo = value.at(0).is_null() ? 0.0 : value.at(0).get<double>();
                const double hi = value.at(1).is_null() ? HUGE_VAL : value.at(1).get<double>();
                store.entries_[key] = {lo, hi};
            }
        }
        return store;
    }

    void save(const std::string& path) const {
        nlohmann::json corridors = nlohmann::json::object();
        for (const auto& [key, c] : entries_) corridors[key] = {finite_or_null(c.first), finite_or_null(c.second)};
        nlohmann::json doc = {{"schema_version", kSchemaVersion}, {"corridors", corridors}};
        std::ofstream out(path);
        if (!out) throw DomainError("cannot write fixtures file " + path);
        out << doc.dump(2) << '\n';
    }

    std::optional<std::pair<double, double>> find(const std::string& key) const {
        std::lock_guard lock(*mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        return std::nullopt;
    }

    void freeze(const std::string& key, double lo, double hi) {
        std::lock_guard lock(*mutex_);
        entries_[key] = {lo, hi};
        dirty_ = true;
    }

    bool dirty() const { return dirty_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::map<std::string, std::pair<double, double>> entries_;
    bool dirty_ = false;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();  // checks may run concurrently
};

struct VerifyOptions {
    std::optional<RadialGrid> grid;  // defaults to default_grid(d)
    int n_steps = 32;
    std::optional<BandRange> bands;   // per-check default when unset
    bool refine = true;               // re-measure on a 2x grid and require <= 5% change
    CorridorStore* store = nullptr;  // frozen corridors; measured-only when null
    bool freeze = true;               // freeze missing corridors into the store
    TrialFamily family = TrialFamily::gaussian();

    RadialGrid grid_for(int d) const { return grid ? *grid : default_grid(d); }
    BandRange bands_or(BandRange fallback) const { return bands ? *bands : fallback; }
};

namespace detail {

inline std::string fmt_key(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline std::string corridor_key(const std::string& check, const Parameters& p, const std::string& extra) {
    return check + "/d=" + std::to_string(p.d) + ",alpha=" + fmt_key(p.alpha) + ",a=" + fmt_key(p.a) +
           ",s=" + fmt_key(p.s) + ",p=" + fmt_key(p.p) + (extra.empty() ? "" : "/" + extra);
}

inline std::pair<double, double> ratio_range(const std::vector<TrialRecord>& trials) {
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& t : trials) {
        if (!std::isfinite(t.ratio)) continue;
        lo = std::min(lo, t.ratio);
        hi = std::max(hi, t.ratio);
    }
    return {lo, hi};
}

/// Compare measured ratios with the frozen corridor, freezing it on a first run.
inline void apply_corridor(VerificationReport& report, const std::string& key, const VerifyOptions& options,
                           bool lower_bound_matters = true) {
    const auto [lo, hi] = ratio_range(report.trials);
    if (!(lo <= hi)) {
        report.note("no finite ratios");
        report.downgrade(Verdict::inconclusive);
        return;
    }
    std::optional<std::pair<double, double>> frozen;
    if (options.store) frozen = options.store->find(key);
    if (!frozen) {
        const double flo = lower_bound_matters ? lo / CorridorStore::kSlack : 0.0;
        const double fhi = hi * CorridorStore::kSlack;
        report.corridor_lo = flo;
        report.corridor_hi = fhi;
        if (options.store && options.freeze) {
            options.store->freeze(key, flo, fhi);
            report.note("corridor frozen on this run under key " + key);
        } else {
            report.note("no frozen corridor for " + key + "; measured range reported");
        }
        if (lower_bound_matters && !(lo > 0.0)) report.downgrade(Verdict::fail);
        if (!std::isfinite(hi)) report.downgrade(Verdict::fail);
        return;
    }
    report.corridor_lo = frozen->first;
    report.corridor_hi = frozen->second;
    for (const auto& t : report.trials) {
        if (!std::isfinite(t.ratio)) continue;
        if (t.ratio < frozen->first || t.ratio > frozen->second) {
            report.note("ratio " + fmt_key(t.ratio) + " at scale " + fmt_key(t.scale) + " leaves the frozen corridor");
            report.downgrade(Verdict::fail);
        }
    }
}

inline RadialGrid refined(const RadialGrid& g) { return make_grid(g.r_min(), g.r_max(), 2 * g.size(), g.dimension()); }

/// Re-measure on the refined grid; ratios moving by more than 5% make the verdict inconclusive.
inline void refinement_guard(VerificationReport& report, const std::vector<TrialRecord>& fine,
                             double tolerance = 0.05) {
    double worst = 0.0;
    for (std::size_t i = 0; i < report.trials.size() && i < fine.size(); ++i) {
        const double a = report.trials[i].ratio, b = fine[i].ratio;
        if (!std::isfinite(a) || !std::isfinite(b) || a == 0.0) continue;
        worst = std::max(worst, std::abs(b / a - 1.0));
    }
    report.note("grid doubling moves ratios by at most " + fmt_key(worst));
    if (worst > tolerance) report.downgrade(Verdict::inconclusive);
}

inline double safe_ratio(double lhs, double rhs) {
    if (lhs == 0.0 && rhs == 0.0) return 1.0;
    return lhs / rhs;
}

inline bool is_zero(const RadialFunction& f) { return f.max_abs() == 0.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Hardy inequality  || |p|^{alpha/2} f ||_p >= C || |x|^{-alpha/2} f ||_p

namespace detail {

inline TrialRecord hardy_record(const RadialFunction& f, const Parameters& params, double scale) {
    const double c = lp_hardy_constant(params.d, params.alpha, params.p);
    const auto up = apply_symbol(f, [&](double k) { return std::pow(k, 0.5 * params.alpha); });
    const double lhs = lp_norm(up, params.p);
    const double rhs = c * lp_norm(f, params.p, -0.5 * params.alpha);
    return {scale, lhs, rhs, safe_ratio(lhs, rhs)};
}

}  // namespace detail

inline VerificationReport verify_hardy(const TrialFamily& trials, const Parameters& params,
                                       const VerifyOptions& options = {}) {
    lp_hardy_constant(params.d, params.alpha, params.p);  // validates 1 < p < 2d/alpha
    VerificationReport report{"hardy", params};
    report.verdict = Verdict::pass;
    report.corridor_lo = 1.0 - 1e-3;
    report.corridor_hi = HUGE_VAL;
    report.note("pass iff lhs >= (1 - 1e-3) rhs");
    const RadialGrid grid = options.grid_for(params.d);

    auto measure = [&](const RadialGrid& g) {
        std::vector<TrialRecord> out;
        if (trials.kind == TrialKind::near_extremal) {
            // sweep epsilon down by halves from the family value over 4 steps
            for (int step = 0; step <= 4; ++step) {
                TrialFamily member = trials;
                member.epsilon = std::ldexp(trials.epsilon, -step);
                auto rec = detail::hardy_record(member.member(g, 1.0, params), params, 1.0);
                rec.extra["epsilon"] = member.epsilon;
                out.push_back(rec);
            }
        } else {
            for (double scale : trials.scales) out.push_back(detail::hardy_record(trials.member(g, scale, params), params, scale));
        }
        return out;
    };
    report.trials = measure(grid);
    for (const auto& t : report.trials) {
        if (t.lhs < t.rhs * (1.0 - 1e-3)) {
            report.note("lhs < rhs at scale " + detail::fmt_key(t.scale));
            report.downgrade(Verdict::fail);
        }
    }
    if (trials.kind == TrialKind::near_extremal) {
        bool monotone = true;
        for (std::size_t i = 1; i < report.trials.size(); ++i) monotone &= report.trials[i].ratio < report.trials[i - 1].ratio;
        report.note(monotone ? "near-extremal ratios decrease monotonically" : "near-extremal ratios are not monotone");
        if (!monotone) report.downgrade(Verdict::fail);
    }
    if (options.refine) detail::refinement_guard(report, measure(detail::refined(grid)));
    return report;
}

// ---------------------------------------------------------------------------
// generalized Hardy  || |x|^{-alpha s/2} f ||_p <~ || L^{s/2} f ||_p  for alpha s/2 + delta < d/p < d - delta

enum class Window { inside, outside, ambiguous };

inline Window generalized_hardy_window(const Parameters& p) {
    const double lo = 0.5 * p.alpha * p.s + p.delta;
    const double hi = p.d - p.delta;
    const double x = p.d / p.p;
    if (std::abs(x - lo) < 1e-9 || std::abs(x - hi) < 1e-9) return Window::ambiguous;
    return (x > lo && x < hi) ? Window::inside : Window::outside;
}

namespace detail {

inline TrialRecord generalized_hardy_record(const RadialFunction& f, const Parameters& params, double scale) {
    const double lhs = lp_norm(f, params.p, -0.5 * params.alpha * params.s);
    double rhs = 0.0;
    if (!is_zero(f)) rhs = lp_norm(fractional_power_apply(f, params.s, PowerSign::positive, params), params.p);
    return {scale, lhs, rhs, safe_ratio(lhs, rhs)};
}

}  // namespace detail

inline VerificationReport verify_generalized_hardy(const TrialFamily& trials, const Parameters& params,
                                                   const VerifyOptions& options = {}) {
    VerificationReport report{"generalized-hardy", params};
    if (params.a < 0.0) throw UnsupportedError("generalized Hardy check needs a >= 0");
    const Window window = generalized_hardy_window(params);
    if (window == Window::ambiguous) {
        report.note("d/p within 1e-9 of a window boundary");
        report.verdict = Verdict::inconclusive;
        return report;
    }
    report.verdict = Verdict::pass;
    const RadialGrid grid = options.grid_for(params.d);

    if (window == Window::inside) {
        auto measure = [&](const RadialGrid& g) {
            std::vector<TrialRecord> out;
            for (double scale : trials.scales) {
                out.push_back(detail::generalized_hardy_record(trials.member(g, scale, params), params, scale));
            }
            return out;
        };
        report.trials = measure(grid);
        report.note("inside the window; ratio = || |x|^{-alpha s/2} f ||_p / || L^{s/2} f ||_p");
        detail::apply_corridor(report, detail::corridor_key(report.check, params, trials.name()), options);
        if (options.refine) detail::refinement_guard(report, measure(detail::refined(grid)));
        return report;
    }

    // outside: truncated powers r^{-d/p + alpha s/2 + delta + eps} times a plateau, eps halved per step
    report.note("outside the window; counterexample sweep, pass iff the ratio grows >= 1.5x per step");
    for (int step = 0; step <= 4; ++step) {
        const double eps = std::ldexp(0.4, -step);
        const double e = -params.d / params.p + 0.5 * params.alpha * params.s + params.delta + eps;
        auto rec = detail::generalized_hardy_record(TrialFamily::power_tail(e, 1.0).member(grid, 1.0, params), params, 1.0);
        rec.extra["epsilon"] = eps;
        report.trials.push_back(rec);
    }
    report.corridor_lo = 0.0;
    report.corridor_hi = HUGE_VAL;
    for (std::size_t i = 1; i < report.trials.size(); ++i) {
        const double growth = report.trials[i].ratio / report.trials[i - 1].ratio;
        if (!(growth >= 1.5)) {
            report.note("growth " + detail::fmt_key(growth) + " below 1.5 at step " + std::to_string(i));
            report.downgrade(Verdict::fail);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// norm equivalence  || |p|^{alpha s/2} f ||_p ~ || L^{s/2} f ||_p

struct EquivalenceWindow {
    bool upper = false;  // item (1): || |p|^{alpha s/2} f || <~ || L^{s/2} f ||
    bool lower = false;  // item (2): || L^{s/2} f || <~ || |p|^{alpha s/2} f ||
};

inline EquivalenceWindow norm_equivalence_window(const Parameters& p) {
    const double x = p.d / p.p;
    const double half = 0.5 * p.alpha * p.s;
    return {half + p.delta < x && x < std::min<double>(p.d, p.d - p.delta), half < x && x < p.d};
}

inline VerificationReport verify_norm_equivalence(const TrialFamily& trials, const Parameters& params,
                                                  const VerifyOptions& options = {}) {
    VerificationReport report{"norm-equivalence", params};
    if (params.s < 2.0 && params.a < 0.0) throw UnsupportedError("norm equivalence for s < 2 needs a >= 0");
    const auto window = norm_equivalence_window(params);
    if (!window.upper && !window.lower) {
        report.note("(d, s, p) outside both items of the equivalence theorem");
        report.verdict = Verdict::inconclusive;
        return report;
    }
    report.verdict = Verdict::pass;
    if (!(window.upper && window.lower)) report.note(window.upper ? "only item (1) applies" : "only item (2) applies");
    report.note("ratio = || |p|^{alpha s/2} f ||_p / || L^{s/2} f ||_p");
    const RadialGrid grid = options.grid_for(params.d);
    const Parameters free_params = params.with_coupling(0.0);

    auto measure = [&](const RadialGrid& g, VerificationReport* out_report) {
        std::vector<TrialRecord> out;
        for (double scale : trials.scales) {
            const auto f = trials.member(g, scale, params);
            const auto free_power = fractional_power_apply(f, params.s, PowerSign::positive, free_params);
            const auto hardy_power = fractional_power_apply(f, params.s, PowerSign::positive, params);
            const double lhs = lp_norm(free_power, params.p);
            const double rhs = lp_norm(hardy_power, params.p);
            TrialRecord rec{scale, lhs, rhs, detail::safe_ratio(lhs, rhs)};
            if (params.s == 2.0 && out_report) {
                // || L f || <= || |p|^alpha f || + |a| || |x|^{-alpha} f ||
                const double bound = lhs + std::abs(params.a) * lp_norm(f, params.p, -params.alpha);
                rec.extra["triangle_bound"] = bound;
                if (rhs > bound * (1.0 + 1e-10)) {
                    out_report->note("triangle inequality violated at scale " + detail::fmt_key(scale));
                    out_report->downgrade(Verdict::fail);
                }
            }
            out.push_back(rec);
        }
        return out;
    };
    report.trials = measure(grid, &report);
    if (params.a == 0.0) {
        for (const auto& t : report.trials) {
            if (std::abs(t.ratio - 1.0) > 1e-10) report.downgrade(Verdict::fail);
        }
        report.corridor_lo = 1.0 - 1e-10;
        report.corridor_hi = 1.0 + 1e-10;
        report.note("a = 0: ratios must equal 1 to 1e-10");
        return report;
    }
    detail::apply_corridor(report, detail::corridor_key(report.check, params, trials.name()), options);
    const auto [lo, hi] = detail::ratio_range(report.trials);
    const double drift = hi / lo - 1.0;
    report.note("dilation drift " + detail::fmt_key(drift));
    if (drift > 0.03) report.downgrade(Verdict::fail);
    if (options.refine) detail::refinement_guard(report, measure(detail::refined(grid), nullptr));
    return report;
}

// ---------------------------------------------------------------------------
// reverse Hardy  || S_0 f - S_a f ||_p <~ || |x|^{-alpha s/2} f ||_p

inline VerificationReport verify_reverse_hardy(const TrialFamily& trials, const Parameters& params,
                                               const VerifyOptions& options = {}) {
    VerificationReport report{"reverse-hardy", params};
    detail::require(params.s > 0.0 && params.s < 2.0, "reverse Hardy check needs s in (0, 2)");
    if (params.a < 0.0) throw UnsupportedError("reverse Hardy check needs a >= 0");
    report.verdict = Verdict::pass;
    report.note("ratio = || S_0 f - S_a f ||_p / || |x|^{-alpha s/2} f ||_p");
    const RadialGrid grid = options.grid_for(params.d);
    const Parameters free_params = params.with_coupling(0.0);
    // weighted bands decay only like N^{-alpha(1 - s/2)} above the spectrum, so the top is wide
    const BandRange bands = options.bands_or({-8, 20});

    double worst_tail = 0.0;
    auto measure = [&](const RadialGrid& g) {
        std::vector<TrialRecord> out;
        for (double scale : trials.scales) {
            const auto f = trials.member(g, scale, params);
            const double rhs = lp_norm(f, params.p, -0.5 * params.alpha * params.s);
            double lhs = 0.0;
            if (params.a != 0.0) {
                const auto b0 = lp_decompose(f, free_params, bands, options.n_steps);
                const auto ba = lp_decompose(f, params, bands, options.n_steps);
                RadialFunction s0 = RadialFunction::zeros(g), sa = RadialFunction::zeros(g);
                double edge = 0.0;
                for (std::size_t b = 0; b < b0.size(); ++b) {
                    const double w = std::pow(b0[b].N(), 0.5 * params.alpha * params.s);
                    for (int i = 0; i < g.size(); ++i) {
                        s0.values[i] += std::pow(w * b0[b].projected[i], 2);
                        sa.values[i] += std::pow(w * ba[b].projected[i], 2);
                    }
                    if (b == 0 || b + 1 == b0.size()) {
                        edge = std::max(edge, w * lp_norm(b0[b].projected - ba[b].projected, params.p));
                    }
                }
                RadialFunction diff = RadialFunction::zeros(g);
                for (int i = 0; i < g.size(); ++i) diff.values[i] = std::sqrt(s0[i]) - std::sqrt(sa[i]);
                lhs = lp_norm(diff, params.p);
                if (lhs > 0.0) worst_tail = std::max(worst_tail, edge / lhs);
            }
            out.push_back({scale, lhs, rhs, params.a == 0.0 ? 0.0 : detail::safe_ratio(lhs, rhs)});
        }
        return out;
    };
    report.trials = measure(grid);
    if (params.a == 0.0) {
        report.corridor_lo = 0.0;
        report.corridor_hi = 0.0;
        report.note("a = 0: both square functions coincide, lhs = 0");
        for (const auto& t : report.trials) {
            if (t.lhs != 0.0) report.downgrade(Verdict::fail);
        }
        return report;
    }
    report.note("largest extreme-band share of lhs " + detail::fmt_key(worst_tail));
    detail::apply_corridor(report, detail::corridor_key(report.check, params, trials.name()), options);
    const auto [lo, hi] = detail::ratio_range(report.trials);
    const double drift = hi / lo - 1.0;
    report.note("dilation drift " + detail::fmt_key(drift));
    if (drift > 0.03) report.downgrade(Verdict::fail);
    if (worst_tail > 0.05) {
        report.note("band truncation tail exceeds 5% of lhs");
        report.downgrade(Verdict::inconclusive);
    }
    if (options.refine) detail::refinement_guard(report, measure(detail::refined(grid)));
    return report;
}

// ---------------------------------------------------------------------------
// heat-kernel corridors and the difference-kernel bound

struct CorridorFit {
    double c_low = HUGE_VAL;
    double c_high = 0.0;
    int samples = 0;
};

/// (min, max) of value / envelope over the samples.
inline CorridorFit fit_corridor(const std::vector<KernelSample>& samples, const Parameters& params,
                                std::vector<std::string>* problems = nullptr) {
    CorridorFit fit;
    for (const auto& s : samples) {
        double env = s.envelope_high;  // envelope shape carried in the sample when averaged
        if (!std::isfinite(env) || env <= 0.0) env = heat_envelope(s.t, s.x_norm, s.y_norm, s.xy_distance, params).value;
        if (env == 0.0) {
            if (s.value > 0.0 && problems) problems->push_back("envelope 0 with positive kernel at x=" + std::to_string(s.x_norm));
            continue;
        }
        const double ratio = s.value / env;
        fit.c_low = std::min(fit.c_low, ratio);
        fit.c_high = std::max(fit.c_high, ratio);
        ++fit.samples;
    }
    return fit;
}

/// Fit (c_low, c_high) on the samples; pass iff 0 < c_low and c_high < inf.
inline VerificationReport verify_heat_bounds(const std::vector<KernelSample>& samples, const Parameters& params) {
    VerificationReport report{"heat-bounds", params};
    std::vector<std::string> problems;
    const auto fit = fit_corridor(samples, params, &problems);
    for (const auto& s : samples) {
        const double env = s.envelope_high > 0.0 && std::isfinite(s.envelope_high)
                               ? s.envelope_high
                               : heat_envelope(s.t, s.x_norm, s.y_norm, s.xy_distance, params).value;
        report.trials.push_back({s.t, s.value, env, env > 0.0 ? s.value / env : HUGE_VAL,
                                 {{"x", s.x_norm}, {"y", s.y_norm}, {"dist", s.xy_distance}}});
    }
    report.corridor_lo = fit.c_low;
    report.corridor_hi = fit.c_high;
    report.verdict = (fit.samples > 0 && fit.c_low > 0.0 && std::isfinite(fit.c_high)) ? Verdict::pass : Verdict::fail;
    for (auto& p : problems) report.note(p);
    if (!problems.empty()) report.downgrade(Verdict::fail);
    report.note(std::to_string(fit.samples) + " samples; trial scale column holds t");
    return report;
}

/// Sample layout in units of the heat length t^{1/alpha}: x = t^{1/alpha} x_hat, y = t^{1/alpha} y_hat.
/// The kernel is exactly scale invariant in these units, and columns are only trusted
/// for x_hat >= 0.1, where Strang splitting has converged (it loses order near the origin).
struct HeatSampleOptions {
    std::vector<double> times{0.1, 1.0, 10.0};
    std::vector<double> y_hat{0.1, 0.3, 1.0, 3.0, 10.0};
    double x_min = 0.1;
    double x_max = 10.0;
    int x_count = 14;  // log-spaced x_hat per column; refinement doubles and keeps the old points
    int n_steps = 32;
    std::optional<RadialGrid> grid;
};

namespace detail {

inline std::vector<double> log_points(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, count == 1 ? 0.0 : double(i) / (count - 1)));
    return out;
}

}  // namespace detail

/// Kernel samples carrying the envelope shape (corridor constants 1) in both envelope fields.
/// For a = 0 the kernel is evaluated pointwise at |x - y| for three angles and |x| = 0 is
/// included; for a > 0 it comes from Strang kernel columns, which are averages over
/// |y| = const, and is compared with the equally averaged envelope.
inline std::vector<KernelSample> heat_kernel_samples(const Parameters& params, const HeatSampleOptions& options) {
    std::vector<KernelSample> out;
    const auto xs = detail::log_points(options.x_min, options.x_max, options.x_count);
    if (params.a == 0.0) {
        std::vector<double> with_origin{0.0};
        with_origin.insert(with_origin.end(), xs.begin(), xs.end());
        for (double t : options.times) {
            const double length = std::pow(t, 1.0 / params.alpha);
            for (double yh : options.y_hat) {
                for (double xh : with_origin) {
                    const double x = length * xh, y = length * yh;
                    for (double c : {1.0, 0.0, -1.0}) {
                        const double dist = std::sqrt(std::max(0.0, x * x + y * y - 2.0 * x * y * c));
                        const double value = free_heat_kernel(t, dist, params.d, params.alpha);
                        const auto env = heat_envelope(t, x, y, dist, params);
                        out.push_back({t, x, y, dist, value, env.value, env.value});
                        if (xh == 0.0) break;  // angle is irrelevant at the origin
                    }
                }
            }
        }
        return out;
    }
    const RadialGrid base = options.grid ? *options.grid : default_grid(params.d);
    for (double t : options.times) {
        const double length = std::pow(t, 1.0 / params.alpha);
        // the grid follows the heat length so every t is resolved alike
        const RadialGrid grid = make_grid(base.r_min() * length, base.r_max() * length, base.size(), base.dimension());
        for (double yh : options.y_hat) {
            const double y = length * yh;
            const auto column = hardy_kernel_column(t, y, params, options.n_steps, grid);
            const RadialInterpolant interp(column);
            for (double xh : xs) {
                const double x = length * xh;
                const double env = angular_average(params.d, x, y, [&](double dist) {
                    return heat_envelope(t, x, y, dist, params).value;
                });
                out.push_back({t, x, y, std::abs(x - y), interp(x), env, env});
            }
        }
    }
    return out;
}

/// Heat-bound check with the corridor refined twice: 2x samples, then 2x Strang steps.
inline VerificationReport verify_heat_bounds_refined(const Parameters& params, const HeatSampleOptions& base) {
    if (params.a < 0.0) throw UnsupportedError("heat-bound check needs a >= 0 (kernel values from time stepping)");
    const auto samples = heat_kernel_samples(params, base);
    VerificationReport report = verify_heat_bounds(samples, params);
    HeatSampleOptions more = base;
    more.x_count = 2 * base.x_count - 1;  // superset of the base points
    const auto fit_more = fit_corridor(heat_kernel_samples(params, more), params);
    auto drift = [&](const CorridorFit& other) {
        return std::max(std::abs(other.c_low / report.corridor_lo - 1.0), std::abs(other.c_high / report.corridor_hi - 1.0));
    };
    double worst = drift(fit_more);
    report.note("2x samples: corridor [" + detail::fmt_key(fit_more.c_low) + ", " + detail::fmt_key(fit_more.c_high) + "]");
    if (params.a != 0.0) {
        HeatSampleOptions steps = base;
        steps.n_steps = 2 * base.n_steps;
        const auto fit_steps = fit_corridor(heat_kernel_samples(params, steps), params);
        worst = std::max(worst, drift(fit_steps));
        report.note("2x steps: corridor [" + detail::fmt_key(fit_steps.c_low) + ", " + detail::fmt_key(fit_steps.c_high) + "]");
    }
    report.note("refinement drift " + detail::fmt_key(worst));
    if (worst > 0.10) report.downgrade(Verdict::fail);
    return report;
}

struct DifferenceSample {
    double t, x_norm, y_norm;
    double free_value, hardy_value, difference, bound;
    bool dropped = false;
};

/// K_t = free kernel - Hardy kernel on averaged columns, with the averaged L + M bound.
inline std::vector<DifferenceSample> difference_samples(const Parameters& params, double t,
                                                        const std::vector<double>& y_norms,
                                                        const std::vector<double>& x_norms, int n_steps,
                                                        const RadialGrid& grid) {
    std::vector<DifferenceSample> out;
    for (double y : y_norms) {
        const auto bump = shell_bump(grid, y);
        const auto free_col = free_semigroup_apply(bump, t, params.alpha);
        const auto hardy_col = hardy_semigroup_apply(bump, t, params, n_steps);
        const auto hardy_fine = hardy_semigroup_apply(bump, t, params, 2 * n_steps);
        const RadialInterpolant fi(free_col), hi(hardy_col), hf(hardy_fine);
        for (double x : x_norms) {
            const double bound = angular_average(params.d, x, y, [&](double dist) {
                const auto lm = lm_bounds(t, x, y, dist, params);
                return lm.L + lm.M;
            });
            DifferenceSample s{t, x, y, fi(x), hi(x), fi(x) - hi(x), bound};
            const double fine = fi(x) - hf(x);
            s.dropped = std::abs(fine - s.difference) > 0.1 * std::abs(fine);
            s.difference = fine;
            s.hardy_value = hf(x);
            out.push_back(s);
        }
    }
    return out;
}

struct DifferenceOptions {
    double t = 1.0;
    std::vector<double> y_norms = detail::log_points(0.1, 10.0, 10);
    std::vector<double> x_norms = detail::log_points(0.1, 10.0, 12);
    int n_steps = 32;
    std::optional<RadialGrid> grid;
    double cancellation_point = 4.0;
};

inline VerificationReport verify_difference_bound(const Parameters& params, const DifferenceOptions& options,
                                                  const VerifyOptions& verify = {}) {
    VerificationReport report{"difference-bound", params};
    if (params.a < 0.0) throw UnsupportedError("difference-kernel check needs a >= 0");
    report.verdict = Verdict::pass;
    if (params.a == 0.0) {
        report.note("a = 0: K_t vanishes identically");
        report.corridor_lo = 0.0;
        report.corridor_hi = 0.0;
        return report;
    }
    const RadialGrid grid = options.grid ? *options.grid : default_grid(params.d);
    const auto samples = difference_samples(params, options.t, options.y_norms, options.x_norms, options.n_steps, grid);
    int dropped = 0;
    for (const auto& s : samples) {
        if (s.dropped) {
            ++dropped;
            continue;
        }
        report.trials.push_back({s.t, std::abs(s.difference), s.bound, std::abs(s.difference) / s.bound,
                                 {{"x", s.x_norm}, {"y", s.y_norm}}});
    }
    report.note(std::to_string(samples.size()) + " samples, " + std::to_string(dropped) +
                " dropped for Strang noise above 10% of |K_t|; L + M > 0 at every sample since delta_+ = 0");
    detail::apply_corridor(report, detail::corridor_key(report.check, params, "t=" + detail::fmt_key(options.t)),
                           verify, false);
    report.corridor_lo = 0.0;
    if (dropped > 0.2 * static_cast<double>(samples.size())) {
        report.note("more than 20% of samples dropped");
        report.downgrade(Verdict::inconclusive);
    }

    // cancellation where |x| ~ |y| and |x|^alpha >= t
    const double z = options.cancellation_point;
    const auto c = difference_samples(params, options.t, {z}, {z}, options.n_steps, grid).front();
    const double factor = std::min(c.free_value, c.hardy_value) / std::abs(c.difference);
    report.note("cancellation factor at |x| = |y| = " + detail::fmt_key(z) + ": " + detail::fmt_key(factor));
    TrialRecord rec{options.t, std::abs(c.difference), std::min(c.free_value, c.hardy_value), factor,
                    {{"x", z}, {"y", z}, {"cancellation", 1.0}}};
    report.trials.push_back(rec);
    if (!(factor >= 5.0)) {
        report.note("cancellation factor below 5");
        report.downgrade(Verdict::fail);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Bernstein  || P_N f ||_q <~ N^{d(1/p - 1/q)} || f ||_p

inline VerificationReport verify_bernstein(const TrialFamily& trials, const Parameters& params, double p, double q,
                                           const VerifyOptions& options = {}) {
    detail::require(p > 1.0 && p <= q && std::isfinite(q), "Bernstein check needs 1 < p <= q < inf");
    if (params.a < 0.0) throw UnsupportedError("Bernstein check needs a >= 0");
    VerificationReport report{"bernstein", params};
    report.verdict = Verdict::pass;
    report.note("ratio = || P_N f ||_q / (N^{d(1/p-1/q)} || f ||_p) over the band range");
    const RadialGrid grid = options.grid_for(params.d);
    const double gap = params.d * (1.0 / p - 1.0 / q);
    const BandRange bands = options.bands_or({-8, 8});

    auto measure = [&](const RadialGrid& g) {
        std::vector<TrialRecord> out;
        for (double scale : trials.scales) {
            const auto f = trials.member(g, scale, params);
            const double fp = lp_norm(f, p);
            for (const auto& band : lp_decompose(f, params, bands, options.n_steps)) {
                const double lhs = lp_norm(band.projected, q);
                const double rhs = std::pow(band.N(), gap) * fp;
                out.push_back({scale, lhs, rhs, detail::safe_ratio(lhs, rhs), {{"j", band.index_exponent}}});
            }
        }
        return out;
    };
    report.trials = measure(grid);
    detail::apply_corridor(report,
                           detail::corridor_key(report.check, params,
                                                trials.name() + ",p=" + detail::fmt_key(p) + ",q=" + detail::fmt_key(q)),
                           options, false);
    report.corridor_lo = 0.0;

    if (params.a == 0.0) {
        // sharp bands: N^{alpha s/2} || P~_N f ||_2 / || |p|^{alpha s/2} P~_N f ||_2 in [2^{-s/2}, 2^{alpha s/2}]
        const double lo = std::exp2(-0.5 * params.s) * (1.0 - 1e-6);
        const double hi = std::exp2(0.5 * params.alpha * params.s) * (1.0 + 1e-6);
        double worst_lo = HUGE_VAL, worst_hi = 0.0;
        for (double scale : trials.scales) {
            const auto f = trials.member(grid, scale, params);
            for (int j = bands.j_min; j <= bands.j_max; ++j) {
                const double N = std::ldexp(1.0, j);
                // the band's frequency support [N/2, 2^{1/alpha} N] must lie on the reciprocal grid
                const auto k = grid.reciprocal();
                if (0.5 * N < k.r_min() || std::pow(2.0, 1.0 / params.alpha) * N > k.r_max()) continue;
                const auto band = sharp_projection_free(f, N, params);
                const double denom = lp_norm(fractional_power_apply(band, params.s, PowerSign::positive, params), 2.0);
                if (denom < 1e-8 * lp_norm(f, 2.0)) continue;  // rounding noise only
                const double r = std::pow(N, 0.5 * params.alpha * params.s) * lp_norm(band, 2.0) / denom;
                worst_lo = std::min(worst_lo, r);
                worst_hi = std::max(worst_hi, r);
            }
        }
        report.note("sharp-band equivalence ratios in [" + detail::fmt_key(worst_lo) + ", " + detail::fmt_key(worst_hi) +
                    "], allowed [" + detail::fmt_key(lo) + ", " + detail::fmt_key(hi) + "]");
        if (worst_lo < lo || worst_hi > hi) report.downgrade(Verdict::fail);
    }
    if (options.refine) detail::refinement_guard(report, measure(detail::refined(grid)));
    return report;
}

// ---------------------------------------------------------------------------
// Schur integral  int_{R^d} (1 v |z|)^{2 delta_+ - d} |z|^{-delta_+ - beta/p} dz

struct SchurResult {
    double value = HUGE_VAL;
    bool finite = false;
};

/// Exponent test: the inner piece needs beta/p < d - delta_+, the outer piece beta/p > delta_+.
inline bool schur_finite(double delta_plus, double beta, double p, int d) {
    const double e = beta / p;
    return e < d - delta_plus && e > delta_plus;
}

inline SchurResult schur_integral(double delta_plus, double beta, double p, int d) {
    detail::require(d >= 1 && p > 1.0 && std::isfinite(beta) && std::isfinite(delta_plus), "bad Schur arguments");
    if (!schur_finite(delta_plus, beta, p, d)) return {HUGE_VAL, false};
    const double e = beta / p;
    const double omega = sphere_area(d);
    // inner: int_0^1 r^{d-1-delta_+-e} dr, outer: int_1^inf r^{delta_+-e-1} dr
    boost::math::quadrature::tanh_sinh<double> inner_rule;
    boost::math::quadrature::exp_sinh<double> outer_rule;
    const double inner = inner_rule.integrate([&](double r) { return std::pow(r, d - 1.0 - delta_plus - e); }, 0.0, 1.0);
    const double outer =
        outer_rule.integrate([&](double r) { return std::pow(r, delta_plus - e - 1.0); }, 1.0,
                             std::numeric_limits<double>::infinity());
    return {omega * (inner + outer), true};
}

inline VerificationReport verify_schur(const Parameters& params) {
    VerificationReport report{"schur", params};
    report.verdict = Verdict::pass;
    const double dp = params.delta_plus();
    const double q = params.p / (params.p - 1.0);
    const double lo = std::max(params.p, q) * dp;
    const double hi = std::min(params.p, q) * (params.d - dp);
    if (!(lo < hi)) {
        report.note("empty beta range");
        report.verdict = Verdict::inconclusive;
        return report;
    }
    for (int i = 1; i <= 9; ++i) {
        const double beta = lo + (hi - lo) * i / 10.0;
        const auto r = schur_integral(dp, beta, params.p, params.d);
        const double e = beta / params.p;
        const double exact = sphere_area(params.d) * (1.0 / (params.d - dp - e) + 1.0 / (e - dp));
        report.trials.push_back({beta, r.value, exact, r.value / exact, {{"beta", beta}}});
        if (!r.finite || std::abs(r.value / exact - 1.0) > 1e-8) report.downgrade(Verdict::fail);
    }
    report.corridor_lo = 1.0 - 1e-8;
    report.corridor_hi = 1.0 + 1e-8;
    report.note("quadrature against elementary antiderivatives over beta in ((p v p')delta_+, (p ^ p')(d - delta_+)); scale column holds beta");
    return report;
}

// ---------------------------------------------------------------------------
// registry

struct CheckSpec {
    std::string name;
    std::string summary;
};

inline const std::vector<CheckSpec>& check_registry() {
    static const std::vector<CheckSpec> checks{
        {"bernstein", "band-limited L^p -> L^q bound of P_N"},
        {"difference-bound", "|K_t| <~ L + M for the free minus Hardy heat kernel, with cancellation"},
        {"generalized-hardy", "|| |x|^{-alpha s/2} f ||_p <~ || L^{s/2} f ||_p inside the window, growth outside"},
        {"hardy", "sharp fractional Hardy inequality in L^p"},
        {"heat-bounds", "two-sided heat kernel envelope corridor"},
        {"norm-equivalence", "|| |p|^{alpha s/2} f ||_p ~ || L^{s/2} f ||_p"},
        {"reverse-hardy", "square function difference bounded by the weighted norm"},
        {"schur", "Schur integral finiteness and value"},
    };
    return checks;
}

}  // namespace hardy
