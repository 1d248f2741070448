#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stnn/detector.hpp"
#include "stnn/inject.hpp"
#include "stnn/metrics.hpp"
#include "stnn/profile.hpp"
#include "stnn/rng.hpp"
#include "stnn/synth.hpp"

namespace stnn {

/// Seeded benchmark/evaluation suite: half the trials are clean windows,
/// half carry one injected anomaly, cycling uniformly through spike,
/// repeated and false_injection. Detection runs at the standard settings
/// (m = n/10, K = 6) unless overridden.
///
/// The suite profiles with exclusion m/2 and boundary_policy=exclude.
/// Boundary-spanning subsequences splice one channel's tail onto the next
/// channel's quiescent head; with independent per-channel noise those
/// splices have no cross-channel twin and would dominate the false alarms.
struct TrialSuiteConfig {
    std::size_t trials = 200;
    std::size_t n_b = 5;
    std::size_t n = 500;
    double dt = 0.01;
    double coupling = 0.9;
    double noise_std = 0.001;
    double threshold_coefficient = 6.0;
    std::size_t m = 0;  // 0 -> n/10
    std::size_t exclusion_halfwidth = k_auto_exclusion;
    BoundaryPolicy boundary_policy = BoundaryPolicy::exclude;
    std::uint64_t seed = 20240101;
    bool time_brute_force = false;

    static constexpr std::size_t k_auto_exclusion = std::numeric_limits<std::size_t>::max();

    std::size_t effective_m() const { return m > 0 ? m : std::max<std::size_t>(3, n / 10); }
    std::size_t effective_exclusion() const {
        return exclusion_halfwidth == k_auto_exclusion ? effective_m() / 2 : exclusion_halfwidth;
    }
};

/// Timing and correctness record for one trial.
struct BenchmarkRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string kind;  // "clean" or the injected bad-data kind
    bool window_flagged = false;
    bool truth_detected = false;
    bool false_alarm = false;
    double fast_ms = 0.0;
    double brute_ms = -1.0;     // -1 when the oracle was not run
    double max_abs_dev = -1.0;  // fast vs oracle profile deviation
};

struct SuiteResult {
    ConfusionTotals totals;  // aggregated match_report counts
    std::vector<BenchmarkRecord> records;
    std::size_t clean_trials = 0;
    std::size_t clean_flagged = 0;
    std::size_t anomalous_trials = 0;
    std::size_t anomalous_detected = 0;
    double mean_fast_ms = 0.0;
    double mean_brute_ms = 0.0;

    double detection_rate() const {
        return anomalous_trials ? 100.0 * static_cast<double>(anomalous_detected) /
                                      static_cast<double>(anomalous_trials)
                                : 0.0;
    }
    double clean_false_alarm_rate() const {
        return clean_trials ? 100.0 * static_cast<double>(clean_flagged) /
                                  static_cast<double>(clean_trials)
                            : 0.0;
    }
};

/// Deterministic per-trial seed derivation (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace detail

/// One event with onset no later than m samples into the window and a
/// ring-down slow enough to stay above the noise floor through the window
/// end, so shared structure covers every subsequence.
inline GridScenario sample_grid_scenario(std::mt19937_64& rng, const TrialSuiteConfig& cfg) {
    const std::size_t m = cfg.effective_m();
    GridScenario scenario;
    scenario.n_b = cfg.n_b;
    scenario.n = cfg.n;
    scenario.dt = cfg.dt;
    scenario.coupling = cfg.coupling;
    scenario.noise_std = cfg.noise_std;
    scenario.seed = rng();

    GridEvent event;
    const std::size_t onset_lo = std::max<std::size_t>(3, m / 2);
    const std::size_t onset_hi = std::max(onset_lo + 1, m);
    event.onset_sample = uniform_index(rng, onset_lo, onset_hi);
    event.depth = uniform_in(rng, 0.12, 0.3);
    event.duration_samples = uniform_index(rng, 12, 30);
    // base ranges assume 100 Hz sampling; slower rates stretch both timescales
    // so the ring still spans the whole window
    event.ringdown_freq_hz = uniform_in(rng, 0.9, 1.8) / (cfg.dt * 100.0);
    event.ringdown_damping = uniform_in(rng, 0.22, 0.42) / (cfg.dt * 100.0);
    scenario.events.push_back(event);
    return scenario;
}

/// Randomized bad-data draw for the given kind, using the default parameter
/// ranges: 1-3 sample spikes of +-[0.05, 0.5] pu, frozen spans of [m, 2m]
/// samples, and false injections replayed from a donor window's ring-down.
inline BadDataScenario sample_bad_data(std::mt19937_64& rng, BadDataKind kind,
                                       const TrialSuiteConfig& cfg) {
    const std::size_t m = cfg.effective_m();
    BadDataScenario s;
    s.kind = kind;
    s.seed = rng();
    s.channel = uniform_index(rng, 1, cfg.n_b);

    switch (kind) {
        case BadDataKind::spike: {
            s.span = uniform_index(rng, 1, 3);
            const double amp = uniform_in(rng, 0.05, 0.5);
            s.magnitude = uniform01(rng) < 0.5 ? amp : -amp;
            s.start_sample = uniform_index(rng, 1, cfg.n - s.span + 1);
            break;
        }
        case BadDataKind::repeated: {
            s.span = uniform_index(rng, m, 2 * m);
            s.start_sample = uniform_index(rng, 2, cfg.n - s.span + 1);
            s.magnitude = 0.0;
            break;
        }
        case BadDataKind::false_injection: {
            s.span = uniform_index(rng, m, 2 * m);
            s.start_sample = uniform_index(rng, 1, cfg.n - s.span + 1);
            s.magnitude = uniform_in(rng, 0.9, 1.1);

            TrialSuiteConfig donor_cfg = cfg;
            donor_cfg.noise_std = 0.0;
            std::mt19937_64 donor_rng(mix_seed(s.seed, 0x0ddba11));
            const GridScenario donor = sample_grid_scenario(donor_rng, donor_cfg);
            const MeasurementWindow replay = generate(donor).clean;
            const GridEvent& e = donor.events.front();
            const std::size_t ring_start0 = std::min(replay.n - s.span,
                                                     e.onset_sample - 1 + e.duration_samples);
            for (std::size_t k = 0; k < s.span; ++k)
                s.source_segment.push_back(replay.value(0, ring_start0 + k));
            break;
        }
        case BadDataKind::data_loss_zero: {
            s.span = uniform_index(rng, 3, m);
            s.start_sample = uniform_index(rng, 1, cfg.n - s.span + 1);
            s.magnitude = 0.0;
            break;
        }
    }
    return s;
}

struct TrialOutcome {
    DetectionReport report;
    std::vector<BadDataScenario> truth;
    WindowConfusion confusion;
    double fast_ms = 0.0;
    double brute_ms = -1.0;
    double max_abs_dev = -1.0;
};

/// Runs one seeded trial end to end: generate, optionally inject, then
/// normalize -> concatenate -> profile -> detect -> match.
inline TrialOutcome run_trial(const TrialSuiteConfig& cfg, std::uint64_t trial_seed,
                              bool with_anomaly, BadDataKind kind) {
    std::mt19937_64 rng(trial_seed);
    const GridScenario scenario = sample_grid_scenario(rng, cfg);
    TrialOutcome out;

    MeasurementWindow window = generate(scenario).noisy;
    if (with_anomaly) {
        const BadDataScenario bad = sample_bad_data(rng, kind, cfg);
        InjectionResult injected = inject(window, bad);
        window = std::move(injected.window);
        out.truth = std::move(injected.truth);
    }

    const std::size_t m = cfg.effective_m();
    const std::size_t exclusion = cfg.effective_exclusion();
    DetectionConfig detection;
    detection.threshold_coefficient = cfg.threshold_coefficient;

    const auto fast_start = std::chrono::steady_clock::now();
    const MeasurementWindow normalized = normalize_per_channel(window);
    const ConcatenatedSeries series = concatenate(normalized);
    const StnnProfile profile = compute_profile(series, m, exclusion, cfg.boundary_policy);
    out.report = detect(profile, series, detection, "trial", normalized.pre_flags);
    out.fast_ms = detail::elapsed_ms(fast_start);

    if (cfg.time_brute_force) {
        const auto brute_start = std::chrono::steady_clock::now();
        const StnnProfile reference = self_join_oracle(series, m, exclusion, cfg.boundary_policy);
        detect(reference, series, detection, "trial", normalized.pre_flags);
        out.brute_ms = detail::elapsed_ms(brute_start);

        double dev = 0.0;
        for (std::size_t u0 = 0; u0 < profile.size(); ++u0) {
            if (!profile.evaluated(u0) || !reference.evaluated(u0)) continue;
            dev = std::max(dev, std::abs(profile.values[u0] - reference.values[u0]));
        }
        out.max_abs_dev = dev;
    }

    out.confusion = match_report(out.report, out.truth);
    return out;
}

inline SuiteResult run_suite(const TrialSuiteConfig& cfg) {
    static constexpr BadDataKind kinds[] = {BadDataKind::spike, BadDataKind::repeated,
                                            BadDataKind::false_injection};
    SuiteResult result;
    double fast_total = 0.0, brute_total = 0.0;
    std::size_t brute_count = 0, anomalous_index = 0;

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const bool with_anomaly = trial % 2 == 1;
        const BadDataKind kind = kinds[anomalous_index % 3];
        if (with_anomaly) ++anomalous_index;

        const std::uint64_t trial_seed = mix_seed(cfg.seed, trial);
        const TrialOutcome outcome = run_trial(cfg, trial_seed, with_anomaly, kind);

        BenchmarkRecord record;
        record.trial = trial;
        record.seed = trial_seed;
        record.kind = with_anomaly ? to_string(kind) : "clean";
        record.window_flagged = !outcome.report.anomalies.empty();
        record.truth_detected = outcome.confusion.ta > 0;
        record.false_alarm = outcome.confusion.fa > 0;
        record.fast_ms = outcome.fast_ms;
        record.brute_ms = outcome.brute_ms;
        record.max_abs_dev = outcome.max_abs_dev;

        result.totals.n_all += 1;
        result.totals.n_ta += outcome.confusion.ta;
        result.totals.n_fn += outcome.confusion.fn;
        result.totals.n_fa += outcome.confusion.fa;

        if (with_anomaly) {
            ++result.anomalous_trials;
            if (record.truth_detected) ++result.anomalous_detected;
        } else {
            ++result.clean_trials;
            if (record.window_flagged) ++result.clean_flagged;
        }

        fast_total += outcome.fast_ms;
        if (outcome.brute_ms >= 0.0) {
            brute_total += outcome.brute_ms;
            ++brute_count;
        }
        result.records.push_back(std::move(record));
    }

    result.mean_fast_ms = cfg.trials ? fast_total / static_cast<double>(cfg.trials) : 0.0;
    result.mean_brute_ms = brute_count ? brute_total / static_cast<double>(brute_count) : 0.0;
    return result;
}

/// Event-discrimination trial: a genuine coupled dip, optionally with a
/// single-channel spike injected within 0.5 s of the event onset.
struct EventTrialOutcome {
    bool window_flagged = false;
    bool spike_detected = false;
};

inline EventTrialOutcome run_event_trial(const TrialSuiteConfig& cfg, std::uint64_t trial_seed,
                                         bool with_spike) {
    std::mt19937_64 rng(trial_seed);
    const GridScenario scenario = sample_grid_scenario(rng, cfg);
    MeasurementWindow window = generate(scenario).noisy;

    std::vector<BadDataScenario> truth;
    if (with_spike) {
        BadDataScenario spike = sample_bad_data(rng, BadDataKind::spike, cfg);
        const std::size_t onset = scenario.events.front().onset_sample;
        const std::size_t half_second = static_cast<std::size_t>(std::llround(0.5 / cfg.dt));
        const std::size_t lo = onset > half_second ? onset - half_second : 1;
        const std::size_t hi = std::min(cfg.n - spike.span + 1, onset + half_second);
        spike.start_sample = uniform_index(rng, lo, std::max(lo, hi));
        InjectionResult injected = inject(window, spike);
        window = std::move(injected.window);
        truth = std::move(injected.truth);
    }

    DetectionConfig detection;
    detection.threshold_coefficient = cfg.threshold_coefficient;
    const MeasurementWindow normalized = normalize_per_channel(window);
    const ConcatenatedSeries series = concatenate(normalized);
    const StnnProfile profile = compute_profile(series, cfg.effective_m(),
                                                cfg.effective_exclusion(), cfg.boundary_policy);
    const DetectionReport report =
        detect(profile, series, detection, "event-trial", normalized.pre_flags);

    EventTrialOutcome out;
    out.window_flagged = !report.anomalies.empty();
    out.spike_detected = with_spike && match_report(report, truth).ta > 0;
    return out;
}

} // namespace stnn
