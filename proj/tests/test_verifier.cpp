#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hardy/verifier.hpp"

using namespace hardy;

namespace {

constexpr double pi = std::numbers::pi;

VerifyOptions quick(int d, int n = 256) {
    VerifyOptions o;
    o.grid = default_grid(d, n);
    o.refine = false;
    return o;
}

// truncated power integral int_lo^hi r^e dr in closed form
double power_integral(double e, double lo, double hi) {
    if (std::abs(e + 1.0) < 1e-14) return std::log(hi / lo);
    return (std::pow(hi, e + 1.0) - std::pow(lo, e + 1.0)) / (e + 1.0);
}

}  // namespace

TEST(Schur, CentralValue) {
    // delta_+ = 0, beta/p = d/2 = 3/2: 4 pi (2/3 + 2/3) = 16 pi / 3
    const auto r = schur_integral(0.0, 3.0, 2.0, 3);
    ASSERT_TRUE(r.finite);
    EXPECT_NEAR(r.value, 16.0 * pi / 3.0, 1e-10);
}

TEST(Schur, DivergentSentinel) {
    const auto inner = schur_integral(0.0, 7.0, 2.0, 3);  // beta/p >= d
    EXPECT_FALSE(inner.finite);
    EXPECT_TRUE(std::isinf(inner.value));
    EXPECT_FALSE(schur_integral(0.5, 0.8, 2.0, 3).finite);  // beta/p <= delta_+
}

TEST(Schur, FinitenessSweepAgreesWithTruncations) {
    // a divergent piece keeps growing when the truncation is pushed from 1e100 to 1e200 (or 1e-100 to 1e-200)
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dp(0.0, 1.0), beta(0.0, 8.0), p(1.2, 4.0);
    for (int i = 0; i < 100; ++i) {
        const double delta_plus = dp(rng), b = beta(rng), q = p(rng);
        const int d = 3;
        const double e = b / q;
        const double in_a = power_integral(d - 1.0 - delta_plus - e, 1e-100, 1.0);
        const double in_b = power_integral(d - 1.0 - delta_plus - e, 1e-200, 1.0);
        const double out_a = power_integral(delta_plus - e - 1.0, 1.0, 1e100);
        const double out_b = power_integral(delta_plus - e - 1.0, 1.0, 1e200);
        const bool converges = in_b < 1.2 * in_a && out_b < 1.2 * out_a;
        if (std::abs(e - delta_plus) < 0.01 || std::abs(e - (d - delta_plus)) < 0.01) continue;  // too close to call
        EXPECT_EQ(schur_finite(delta_plus, b, q, d), converges) << delta_plus << " " << b << " " << q;
    }
}

TEST(Schur, ReportPasses) {
    const auto report = verify_schur(Parameters::make(3, 1.0, 1.0));
    EXPECT_EQ(report.verdict, Verdict::pass);
    EXPECT_EQ(report.trials.size(), 9u);
}

TEST(Windows, GeneralizedHardy) {
    const auto inside = Parameters::make(3, 1.0, 1.0, 1.0, 2.0);
    EXPECT_EQ(generalized_hardy_window(inside), Window::inside);
    // s = 2, p = 5.413: d/p sits below alpha s/2 + delta
    EXPECT_EQ(generalized_hardy_window(inside.with_s(2.0).with_p(5.413)), Window::outside);
    const double delta = inside.delta;
    const double p_edge = 3.0 / (0.5 + delta);
    EXPECT_EQ(generalized_hardy_window(inside.with_p(p_edge)), Window::ambiguous);
}

TEST(Windows, NormEquivalence) {
    const auto base = Parameters::make(3, 1.0, 1.0, 1.0, 3.0);
    const auto w = norm_equivalence_window(base);
    EXPECT_TRUE(w.upper);
    EXPECT_TRUE(w.lower);
    // p = 3 with s = 2 puts d/p on alpha s/2 exactly
    const auto edge = norm_equivalence_window(base.with_s(2.0));
    EXPECT_FALSE(edge.lower);
}

TEST(Trials, ParseAndFit) {
    EXPECT_EQ(TrialFamily::parse("gaussian").name(), "gaussian");
    EXPECT_EQ(TrialFamily::parse("plateau").scales.size(), 5u);
    const auto tail = TrialFamily::parse("power_tail:0.3:2");
    EXPECT_EQ(tail.kind, TrialKind::power_tail);
    EXPECT_DOUBLE_EQ(tail.exponent, 0.3);
    EXPECT_DOUBLE_EQ(TrialFamily::parse("near_extremal:0.05").epsilon, 0.05);
    EXPECT_THROW(TrialFamily::parse("cauchy"), DomainError);
    EXPECT_THROW(TrialFamily::parse("power_tail:x"), DomainError);
    const auto params = Parameters::make(3, 1.0, 0.0);
    EXPECT_THROW(TrialFamily::gaussian().member(make_grid(1e-3, 2.0, 64, 3), 1.0, params), DomainError);
    const auto f = TrialFamily::plateau().member(default_grid(3, 128), 1.0, params);
    EXPECT_EQ(f.values.back(), 0.0);
}

TEST(Reports, JsonShape) {
    VerificationReport r{"hardy", Parameters::make(3, 1.0, 0.0)};
    r.trials.push_back({1.0, 2.0, 1.0, 2.0, {{"j", 3.0}}});
    r.corridor_lo = 0.5;
    r.verdict = Verdict::pass;
    r.note("first");
    r.note("second");
    const auto j = to_json(r);
    EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
    EXPECT_EQ(j.at("check"), "hardy");
    EXPECT_EQ(j.at("verdict"), "pass");
    EXPECT_EQ(j.at("notes"), "first; second");
    EXPECT_TRUE(j.at("corridor").at(1).is_null());
    EXPECT_EQ(j.at("trials").at(0).at("j"), 3.0);
    for (const char* key : {"scale", "lhs", "rhs", "ratio"}) EXPECT_TRUE(j.at("trials").at(0).contains(key));
    EXPECT_EQ(j.at("params").at("d"), 3);
}

TEST(Reports, DowngradeOrder) {
    VerificationReport r;
    r.verdict = Verdict::pass;
    r.downgrade(Verdict::inconclusive);
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    r.downgrade(Verdict::fail);
    EXPECT_EQ(r.verdict, Verdict::fail);
    r.downgrade(Verdict::inconclusive);
    EXPECT_EQ(r.verdict, Verdict::fail);
}

TEST(Corridors, FreezeThenRegress) {
    const auto path = (std::filesystem::temp_directory_path() / "hardy_corridor_test.json").string();
    std::filesystem::remove(path);
    auto store = CorridorStore::load(path);
    VerifyOptions options;
    options.store = &store;
    VerificationReport first{"x", {}};
    first.verdict = Verdict::pass;
    first.trials = {{1.0, 1.0, 1.0, 0.9}, {2.0, 1.0, 1.0, 1.1}};
    detail::apply_corridor(first, "x/key", options);
    EXPECT_EQ(first.verdict, Verdict::pass);
    EXPECT_NEAR(first.corridor_lo, 0.9 / 1.1, 1e-15);
    EXPECT_NEAR(first.corridor_hi, 1.1 * 1.1, 1e-15);
    ASSERT_TRUE(store.dirty());
    store.save(path);

    auto reloaded = CorridorStore::load(path);
    options.store = &reloaded;
    VerificationReport again{"x", {}};
    again.verdict = Verdict::pass;
    again.trials = {{1.0, 1.0, 1.0, 1.0}};
    detail::apply_corridor(again, "x/key", options);
    EXPECT_EQ(again.verdict, Verdict::pass);
    VerificationReport drifted{"x", {}};
    drifted.verdict = Verdict::pass;
    drifted.trials = {{1.0, 1.0, 1.0, 2.0}};
    detail::apply_corridor(drifted, "x/key", options);
    EXPECT_EQ(drifted.verdict, Verdict::fail);
    EXPECT_FALSE(reloaded.dirty());
    std::filesystem::remove(path);
}

TEST(Hardy, GaussianAboveSharpConstant) {
    const auto report = verify_hardy(TrialFamily::gaussian(), Parameters::make(3, 1.0, 0.0), quick(3));
    EXPECT_EQ(report.verdict, Verdict::pass);
    for (const auto& t : report.trials) EXPECT_GE(t.ratio, 1.0);
    // e^{-r^2}: || |p|^{1/2} f ||^2 = pi and || |x|^{-1/2} f ||^2 = pi, so ratio = 1 / C = sqrt(pi/2)
    EXPECT_NEAR(report.trials.front().ratio, std::sqrt(pi / 2.0), 1e-3);
}

TEST(Hardy, RejectsExponentOutsideRange) {
    EXPECT_THROW(verify_hardy(TrialFamily::gaussian(), Parameters::make(3, 1.0, 0.0, 1.0, 6.5), quick(3)), DomainError);
}

TEST(NormEquivalence, FreeCaseIsIdentity) {
    const auto report = verify_norm_equivalence(TrialFamily::gaussian(), Parameters::make(3, 1.0, 0.0), quick(3));
    EXPECT_EQ(report.verdict, Verdict::pass);
    for (const auto& t : report.trials) EXPECT_NEAR(t.ratio, 1.0, 1e-10);
}

TEST(ReverseHardy, FreeCaseVanishes) {
    auto options = quick(3);
    options.bands = BandRange(-2, 2);
    const auto report = verify_reverse_hardy(TrialFamily::gaussian(), Parameters::make(3, 1.0, 0.0), options);
    EXPECT_EQ(report.verdict, Verdict::pass);
    for (const auto& t : report.trials) EXPECT_EQ(t.lhs, 0.0);
}

TEST(DifferenceBound, FreeCaseTrivial) {
    DifferenceOptions d;
    d.grid = default_grid(3, 128);
    d.n_steps = 4;
    const auto report = verify_difference_bound(Parameters::make(3, 1.0, 0.0), d, quick(3));
    EXPECT_EQ(report.verdict, Verdict::pass);
}

TEST(HeatBounds, PoissonCorridor) {
    // delta = 0, alpha = 1: the ratio on the diagonal is K(1, 0) = 1/pi^2, its largest value
    HeatSampleOptions options;
    const auto samples = heat_kernel_samples(Parameters::make(3, 1.0, 0.0), options);
    const auto report = verify_heat_bounds(samples, Parameters::make(3, 1.0, 0.0));
    EXPECT_EQ(report.verdict, Verdict::pass);
    EXPECT_GE(samples.size(), 200u);
    EXPECT_NEAR(report.corridor_hi, 1.0 / (pi * pi), 1e-9);
    EXPECT_GT(report.corridor_lo, 0.0);
}

TEST(HeatBounds, ZeroEnvelopeFails) {
    // delta < 0 for a > 0, so the envelope vanishes at the origin
    const auto params = Parameters::make(3, 1.0, 1.0);
    std::vector<KernelSample> samples{{1.0, 1.0, 1.0, 0.0, 0.1}, {1.0, 1.0, 2.0, 1.0, 0.05}};
    EXPECT_EQ(verify_heat_bounds(samples, params).verdict, Verdict::pass);
    samples.push_back({1.0, 0.0, 1.0, 1.0, 0.02});
    const auto report = verify_heat_bounds(samples, params);
    EXPECT_EQ(report.verdict, Verdict::fail);
    EXPECT_NE(report.notes.front().find("envelope 0"), std::string::npos);
}

TEST(Registry, SortedAndComplete) {
    const auto& checks = check_registry();
    ASSERT_EQ(checks.size(), 8u);
    for (std::size_t i = 1; i < checks.size(); ++i) EXPECT_LT(checks[i - 1].name, checks[i].name);
}
