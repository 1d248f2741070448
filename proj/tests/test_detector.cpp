#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "stnn/detector.hpp"
#include "stnn/report.hpp"
#include "stnn/trials.hpp"

using Catch::Approx;
using namespace stnn;

namespace {

StnnProfile profile_from_values(std::vector<double> values, std::size_t m = 10) {
    StnnProfile p;
    p.m = m;
    p.values = std::move(values);
    p.neighbor_index.assign(p.values.size(), 1);
    p.spans_boundary.assign(p.values.size(), 0);
    return p;
}

TrialSuiteConfig suite_config() {
    TrialSuiteConfig cfg;
    cfg.n_b = 5;
    cfg.n = 500;
    return cfg;
}

} // namespace

TEST_CASE("adaptive threshold", "[detector]") {
    SECTION("constant profile collapses to the constant") {
        const auto p = profile_from_values(std::vector<double>(20, 3.25));
        REQUIRE(compute_threshold(p, 6.0) == Approx(3.25).margin(1e-12));
    }
    SECTION("hand-computed mean + K*std") {
        const auto p = profile_from_values({1, 1, 1, 1, 10});
        REQUIRE(compute_threshold(p, 1.0) == Approx(6.4).margin(1e-9));
    }
    SECTION("K = 0 degenerates to the mean") {
        const auto p = profile_from_values({2, 4, 6, 8});
        REQUIRE(compute_threshold(p, 0.0) == Approx(5.0).margin(1e-12));
    }
    SECTION("all-sentinel profile is an error") {
        auto p = profile_from_values({1, 2, 3});
        p.values.assign(3, StnnProfile::not_evaluated());
        REQUIRE_THROWS_AS(compute_threshold(p, 6.0), std::invalid_argument);
    }
}

TEST_CASE("detect flags injected anomalies and nothing else", "[detector]") {
    const TrialSuiteConfig cfg = suite_config();

    SECTION("profile entirely below threshold yields a clean report") {
        const TrialOutcome outcome = run_trial(cfg, 12345, false, BadDataKind::spike);
        REQUIRE(outcome.report.anomalies.empty());
        REQUIRE(outcome.confusion.fa == 0);
    }
    SECTION("single spike is localized to its channel and overlaps the span") {
        std::mt19937_64 rng(99);
        const GridScenario scenario = sample_grid_scenario(rng, cfg);
        MeasurementWindow window = generate(scenario).noisy;

        BadDataScenario spike;
        spike.kind = BadDataKind::spike;
        spike.channel = 3;
        spike.start_sample = 321;
        spike.span = 2;
        spike.magnitude = 0.35;
        const InjectionResult injected = inject(window, spike);

        const MeasurementWindow normalized = normalize_per_channel(injected.window);
        const ConcatenatedSeries series = concatenate(normalized);
        const StnnProfile profile = compute_profile(series, 50, 25, BoundaryPolicy::exclude);
        const DetectionReport report = detect(profile, series, {}, "w", normalized.pre_flags);

        REQUIRE(report.anomalies.size() == 1);
        const WindowConfusion counts = match_report(report, injected.truth);
        REQUIRE(counts.ta == 1);
        REQUIRE(counts.fn == 0);
        REQUIRE(counts.fa == 0);
    }
    SECTION("two well-separated spikes come back as two disjoint anomalies") {
        // two anomalies in one window double the share of elevated profile
        // positions, which feeds back into the adaptive threshold; a longer
        // window keeps that share small enough for both peaks to clear it
        TrialSuiteConfig wide = cfg;
        wide.n = 1000;
        wide.m = 50;
        std::mt19937_64 rng(7);
        const GridScenario scenario = sample_grid_scenario(rng, wide);
        MeasurementWindow window = generate(scenario).noisy;

        BadDataScenario first{BadDataKind::spike, 2, 300, 2, 0.4, {}, 0};
        BadDataScenario second{BadDataKind::spike, 4, 800, 2, -0.4, {}, 0};
        window = inject(window, first).window;
        const InjectionResult both = inject(window, second);

        const MeasurementWindow normalized = normalize_per_channel(both.window);
        const ConcatenatedSeries series = concatenate(normalized);
        const StnnProfile profile = compute_profile(series, 50, 25, BoundaryPolicy::exclude);
        const DetectionReport report = detect(profile, series, {}, "w", normalized.pre_flags);

        REQUIRE(report.anomalies.size() == 2);
        for (std::size_t i = 1; i < report.anomalies.size(); ++i)
            REQUIRE(report.anomalies[i - 1].flat_end < report.anomalies[i].flat_start);

        const WindowConfusion counts =
            match_report(report, std::vector<BadDataScenario>{first, second});
        REQUIRE(counts.ta == 2);
        REQUIRE(counts.fa == 0);
    }
}

TEST_CASE("detection works at the 7-channel 25 Hz configuration", "[detector]") {
    // 16 s window at 25 Hz: n = 400, m = n/10 = 40
    TrialSuiteConfig cfg;
    cfg.n_b = 7;
    cfg.n = 400;
    cfg.dt = 0.04;

    std::size_t detected = 0, clean_flagged = 0;
    const BadDataKind kinds[] = {BadDataKind::spike, BadDataKind::repeated,
                                 BadDataKind::false_injection};
    for (std::size_t t = 0; t < 12; ++t) {
        const TrialOutcome bad = run_trial(cfg, mix_seed(2468, t), true, kinds[t % 3]);
        if (bad.confusion.ta > 0) ++detected;
        const TrialOutcome clean = run_trial(cfg, mix_seed(1357, t), false, kinds[0]);
        if (!clean.report.anomalies.empty()) ++clean_flagged;
    }
    REQUIRE(detected >= 11);
    REQUIRE(clean_flagged == 0);
}

TEST_CASE("match_report counting rules", "[detector]") {
    DetectionReport report;
    Anomaly a;
    a.flat_start = 101;
    a.flat_end = 150;
    a.channel_locations = {{1, 101, 150}};
    a.peak_value = 9.0;
    a.peak_index = 110;
    report.anomalies.push_back(a);

    BadDataScenario truth;
    truth.kind = BadDataKind::spike;
    truth.channel = 1;
    truth.start_sample = 150;
    truth.span = 10;

    SECTION("one overlapping detection") {
        const auto counts = match_report(report, {truth});
        REQUIRE(counts.ta == 1);
        REQUIRE(counts.fn == 0);
        REQUIRE(counts.fa == 0);
    }
    SECTION("clean truth with one detection is a false alarm") {
        const auto counts = match_report(report, {});
        REQUIRE(counts.ta == 0);
        REQUIRE(counts.fn == 0);
        REQUIRE(counts.fa == 1);
    }
    SECTION("detection on the wrong channel misses and false-alarms") {
        truth.channel = 2;
        const auto counts = match_report(report, {truth});
        REQUIRE(counts.ta == 0);
        REQUIRE(counts.fn == 1);
        REQUIRE(counts.fa == 1);
    }
}

TEST_CASE("detector properties", "[detector]") {
    const TrialSuiteConfig cfg = suite_config();

    SECTION("anomaly sets shrink as K grows") {
        for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
            std::mt19937_64 rng(seed);
            const GridScenario scenario = sample_grid_scenario(rng, cfg);
            MeasurementWindow window = generate(scenario).noisy;
            const BadDataScenario bad = sample_bad_data(rng, BadDataKind::spike, cfg);
            window = inject(window, bad).window;
            const MeasurementWindow normalized = normalize_per_channel(window);
            const ConcatenatedSeries series = concatenate(normalized);
            const StnnProfile profile = compute_profile(series, 50, 25, BoundaryPolicy::exclude);

            DetectionConfig lo, hi;
            lo.threshold_coefficient = 4.0;
            hi.threshold_coefficient = 8.0;
            const auto report_lo = detect(profile, series, lo);
            const auto report_hi = detect(profile, series, hi);
            for (const Anomaly& a : report_hi.anomalies) {
                bool found = false;
                for (const Anomaly& b : report_lo.anomalies)
                    found = found || (b.flat_start <= a.peak_index && a.peak_index <= b.flat_end);
                REQUIRE(found);
            }
        }
    }
    SECTION("identical inputs give byte-identical serialized reports") {
        const TrialOutcome once = run_trial(cfg, 424242, true, BadDataKind::repeated);
        const TrialOutcome twice = run_trial(cfg, 424242, true, BadDataKind::repeated);
        const std::vector<std::string> ids{"b1", "b2", "b3", "b4", "b5"};
        REQUIRE(report_to_json(once.report, ids).dump() == report_to_json(twice.report, ids).dump());
    }
    SECTION("positive affine transformation leaves the reported anomalies unchanged") {
        std::mt19937_64 rng(5);
        const GridScenario scenario = sample_grid_scenario(rng, cfg);
        MeasurementWindow window = generate(scenario).noisy;
        const BadDataScenario bad = sample_bad_data(rng, BadDataKind::spike, cfg);
        window = inject(window, bad).window;

        const ConcatenatedSeries series = concatenate(window);
        ConcatenatedSeries transformed = series;
        for (double& v : transformed.data) v = 2.5 * v + 7.0;

        const auto report_a = detect(compute_profile(series, 50, 25, BoundaryPolicy::exclude), series);
        const auto report_b = detect(compute_profile(transformed, 50, 25, BoundaryPolicy::exclude), transformed);
        REQUIRE(report_a.anomalies.size() == report_b.anomalies.size());
        for (std::size_t i = 0; i < report_a.anomalies.size(); ++i) {
            REQUIRE(report_a.anomalies[i].flat_start == report_b.anomalies[i].flat_start);
            REQUIRE(report_a.anomalies[i].flat_end == report_b.anomalies[i].flat_end);
            REQUIRE(report_a.anomalies[i].peak_index == report_b.anomalies[i].peak_index);
            REQUIRE(report_a.anomalies[i].channel_locations ==
                    report_b.anomalies[i].channel_locations);
        }
    }
    SECTION("regions that are entirely pre-flagged do not raise their own anomalies") {
        std::mt19937_64 rng(21);
        const GridScenario scenario = sample_grid_scenario(rng, cfg);
        MeasurementWindow window = generate(scenario).noisy;
        // simulate a 120-sample data loss on channel 2, zero-filled and flagged
        for (std::size_t k = 0; k < 120; ++k) {
            window.value(1, 200 + k) = 0.0;
            window.pre_flags.push_back({2, 201 + k});
        }
        const MeasurementWindow normalized = normalize_per_channel(window);
        const ConcatenatedSeries series = concatenate(normalized);
        const StnnProfile profile = compute_profile(series, 50, 25, BoundaryPolicy::exclude);
        const DetectionReport report = detect(profile, series, {}, "w", normalized.pre_flags);

        const std::size_t gap_flat_start = 1 * 500 + 201;
        const std::size_t gap_flat_end = 1 * 500 + 320;
        for (const Anomaly& a : report.anomalies) {
            const bool inside = a.flat_start >= gap_flat_start && a.flat_end <= gap_flat_end;
            REQUIRE_FALSE(inside);
        }
    }
}
