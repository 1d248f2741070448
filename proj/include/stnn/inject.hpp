#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnn/measurement.hpp"

namespace stnn {

enum class BadDataKind { spike, repeated, false_injection, data_loss_zero };

inline const char* to_string(BadDataKind kind) {
    switch (kind) {
        case BadDataKind::spike: return "spike";
        case BadDataKind::repeated: return "repeated";
        case BadDataKind::false_injection: return "false_injection";
        case BadDataKind::data_loss_zero: return "data_loss_zero";
    }
    return "unknown";
}

inline BadDataKind bad_data_kind_from_string(const std::string& s) {
    if (s == "spike") return BadDataKind::spike;
    if (s == "repeated") return BadDataKind::repeated;
    if (s == "false_injection") return BadDataKind::false_injection;
    if (s == "data_loss_zero") return BadDataKind::data_loss_zero;
    throw std::invalid_argument("unknown bad-data kind: " + s);
}

/// One injected anomaly. channel and start_sample are 1-based. magnitude is
/// kind-specific: additive pulse height for spikes, scale factor for false
/// injection, unused otherwise.
struct BadDataScenario {
    BadDataKind kind = BadDataKind::spike;
    std::size_t channel = 1;
    std::size_t start_sample = 1;
    std::size_t span = 1;
    double magnitude = 0.0;
    std::vector<double> source_segment;
    std::uint64_t seed = 0;
};

struct InjectionResult {
    MeasurementWindow window;
    std::vector<BadDataScenario> truth;
};

/// Applies one bad-data scenario to a clean window. Samples outside the span
/// are untouched. Deterministic: the scenario fully describes the edit.
inline InjectionResult inject(const MeasurementWindow& window, const BadDataScenario& scenario) {
    if (scenario.channel < 1 || scenario.channel > window.n_b)
        throw std::invalid_argument("inject: channel " + std::to_string(scenario.channel) +
                                    " out of range");
    if (scenario.span < 1 || scenario.start_sample < 1 ||
        scenario.start_sample + scenario.span - 1 > window.n)
        throw std::invalid_argument("inject: span [" + std::to_string(scenario.start_sample) + ", " +
                                    std::to_string(scenario.start_sample + scenario.span - 1) +
                                    "] out of range for n=" + std::to_string(window.n));
    if (!std::isfinite(scenario.magnitude))
        throw std::invalid_argument("inject: magnitude must be finite");
    if (scenario.kind == BadDataKind::false_injection &&
        scenario.source_segment.size() != scenario.span)
        throw std::invalid_argument("inject: false_injection needs a source segment of length " +
                                    std::to_string(scenario.span));

    InjectionResult result{window, {scenario}};
    MeasurementWindow& out = result.window;
    const std::size_t ch0 = scenario.channel - 1;
    const std::size_t s0 = scenario.start_sample - 1;

    switch (scenario.kind) {
        case BadDataKind::spike:
            for (std::size_t k = 0; k < scenario.span; ++k)
                out.value(ch0, s0 + k) += scenario.magnitude;
            break;
        case BadDataKind::repeated: {
            const double frozen = out.value(ch0, s0 > 0 ? s0 - 1 : 0);
            for (std::size_t k = 0; k < scenario.span; ++k) out.value(ch0, s0 + k) = frozen;
            break;
        }
        case BadDataKind::false_injection:
            for (std::size_t k = 0; k < scenario.span; ++k)
                out.value(ch0, s0 + k) = scenario.magnitude * scenario.source_segment[k];
            break;
        case BadDataKind::data_loss_zero:
            for (std::size_t k = 0; k < scenario.span; ++k) out.value(ch0, s0 + k) = 0.0;
            break;
    }
    return result;
}

} // namespace stnn
