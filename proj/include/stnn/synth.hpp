#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnn/measurement.hpp"
#include "stnn/rng.hpp"

namespace stnn {

/// One shared grid event: a sudden dip followed by a damped sinusoid
/// ring-down, seen by every channel at the same sample.
struct GridEvent {
    std::size_t onset_sample = 1;  // 1-based
    double depth = 0.2;            // per-unit dip magnitude
    std::size_t duration_samples = 20;
    double ringdown_freq_hz = 1.2;
    double ringdown_damping = 0.3;  // 1/s
};

/// Desk-scale stand-in for correlated regional measurements: every channel
/// sees the same event response, scaled per channel by
/// coupling + (1-coupling)*factor with a seeded factor in [0.8, 1.2], plus
/// independent Gaussian noise in the noisy variant.
struct GridScenario {
    std::size_t n_b = 5;
    std::size_t n = 500;
    double dt = 0.01;
    double coupling = 0.9;
    double noise_std = 0.001;
    std::vector<GridEvent> events;
    std::uint64_t seed = 1;
};

struct GeneratedWindow {
    MeasurementWindow clean;
    MeasurementWindow noisy;
};

namespace detail {

// Fraction of the dip recovered while the fault is still on, and the
// amplitude of the post-clearing ring relative to the dip depth. The in-dip
// slope keeps fault-on subsequences from being flat.
inline constexpr double k_in_dip_recovery = 0.25;
inline constexpr double k_ringdown_scale = 0.45;

inline double event_response(const GridEvent& e, std::size_t t0, double dt) {
    const std::size_t onset0 = e.onset_sample - 1;
    if (t0 < onset0) return 0.0;
    const std::size_t since = t0 - onset0;
    if (since < e.duration_samples) {
        const double progress = static_cast<double>(since) / static_cast<double>(e.duration_samples);
        return -e.depth * (1.0 - k_in_dip_recovery * progress);
    }
    const double tau = static_cast<double>(since - e.duration_samples) * dt;
    return -e.depth * k_ringdown_scale * std::exp(-e.ringdown_damping * tau) *
           std::cos(2.0 * std::numbers::pi * e.ringdown_freq_hz * tau);
}

} // namespace detail

inline GeneratedWindow generate(const GridScenario& scenario) {
    if (scenario.n_b < 2 || scenario.n < 3) throw std::invalid_argument("generate: window too small");
    if (scenario.coupling < 0.0 || scenario.coupling > 1.0)
        throw std::invalid_argument("generate: coupling outside [0, 1]");
    if (scenario.noise_std < 0.0) throw std::invalid_argument("generate: negative noise_std");
    if (!(scenario.dt > 0.0)) throw std::invalid_argument("generate: dt must be positive");
    for (const GridEvent& e : scenario.events) {
        if (e.onset_sample < 1 || e.onset_sample > scenario.n || e.duration_samples < 1 ||
            e.onset_sample - 1 + e.duration_samples > scenario.n)
            throw std::invalid_argument("generate: event outside window bounds");
    }

    std::mt19937_64 rng(scenario.seed);
    std::vector<double> scale(scenario.n_b);
    for (std::size_t i = 0; i < scenario.n_b; ++i) {
        const double factor = uniform_in(rng, 0.8, 1.2);
        scale[i] = scenario.coupling + (1.0 - scenario.coupling) * factor;
    }

    MeasurementWindow clean;
    clean.n_b = scenario.n_b;
    clean.n = scenario.n;
    clean.dt = scenario.dt;
    for (std::size_t i = 1; i <= scenario.n_b; ++i) clean.channel_ids.push_back("bus" + std::to_string(i));
    clean.values.resize(scenario.n_b * scenario.n);

    std::vector<double> response(scenario.n, 0.0);
    for (std::size_t t0 = 0; t0 < scenario.n; ++t0)
        for (const GridEvent& e : scenario.events)
            response[t0] += detail::event_response(e, t0, scenario.dt);

    for (std::size_t i = 0; i < scenario.n_b; ++i)
        for (std::size_t t0 = 0; t0 < scenario.n; ++t0)
            clean.value(i, t0) = 1.0 + scale[i] * response[t0];

    GeneratedWindow out;
    out.noisy = clean;
    if (scenario.noise_std > 0.0) {
        for (std::size_t i = 0; i < scenario.n_b; ++i)
            for (std::size_t t0 = 0; t0 < scenario.n; ++t0)
                out.noisy.value(i, t0) += scenario.noise_std * gaussian(rng);
    }
    out.clean = std::move(clean);
    return out;
}

} // namespace stnn
