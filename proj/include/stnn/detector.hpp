#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnn/inject.hpp"
#include "stnn/measurement.hpp"
#include "stnn/profile.hpp"

namespace stnn {

/// Detection tuning. K scales the adaptive threshold; peak_step is the
/// stride used while probing outward from a peak (0 derives m/10, minimum 1,
/// the stepping used in streaming operation).
struct DetectionConfig {
    double threshold_coefficient = 6.0;
    std::size_t peak_step = 0;
    std::size_t max_anomalies = 32;
};

/// One flagged region. Flat positions are 1-based over the concatenated
/// series; channel_locations is the same region split per channel.
struct Anomaly {
    std::size_t flat_start = 0;
    std::size_t flat_end = 0;
    std::vector<ChannelSpan> channel_locations;
    double peak_value = 0.0;
    std::size_t peak_index = 0;  // 1-based profile position of the peak
};

struct DetectionReport {
    std::string window_id;
    double threshold = 0.0;
    double profile_mean = 0.0;
    double profile_std = 0.0;
    std::vector<Anomaly> anomalies;
    std::vector<PreFlag> pre_flags;
};

/// Adaptive threshold: mean + K * population std over the evaluated profile
/// entries.
inline double compute_threshold(const StnnProfile& profile, double threshold_coefficient) {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t u0 = 0; u0 < profile.size(); ++u0) {
        if (!profile.evaluated(u0)) continue;
        sum += profile.values[u0];
        sum_sq += profile.values[u0] * profile.values[u0];
        ++count;
    }
    if (count < 2) throw std::invalid_argument("threshold: profile has fewer than 2 evaluated entries");
    const double mean = sum / static_cast<double>(count);
    double var = sum_sq / static_cast<double>(count) - mean * mean;
    if (var < 0.0) var = 0.0;
    return mean + threshold_coefficient * std::sqrt(var);
}

namespace detail {

struct ProfileMoments {
    double mean = 0.0;
    double std_dev = 0.0;
};

inline ProfileMoments profile_moments(const StnnProfile& profile) {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t u0 = 0; u0 < profile.size(); ++u0) {
        if (!profile.evaluated(u0)) continue;
        sum += profile.values[u0];
        sum_sq += profile.values[u0] * profile.values[u0];
        ++count;
    }
    ProfileMoments out;
    if (count == 0) return out;
    out.mean = sum / static_cast<double>(count);
    double var = sum_sq / static_cast<double>(count) - out.mean * out.mean;
    out.std_dev = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
}

} // namespace detail

/// Iterative peak extraction: take the largest unmasked profile value; if it
/// exceeds the threshold, accept it, probe outward in peak_step strides
/// while probed values stay above the threshold, then mask the overlap zone
/// (m-1 positions either side of the accepted range) and repeat. Regions
/// whose every sample was pre-flagged at ingestion never produce anomalies
/// of their own.
inline DetectionReport detect(const StnnProfile& profile, const ConcatenatedSeries& series,
                              const DetectionConfig& config = {}, std::string window_id = {},
                              std::vector<PreFlag> pre_flags = {}) {
    const std::size_t count = profile.size();
    const std::size_t m = profile.m;
    const std::size_t step = config.peak_step > 0 ? config.peak_step
                                                  : std::max<std::size_t>(1, m / 10);

    DetectionReport report;
    report.window_id = std::move(window_id);
    report.pre_flags = std::move(pre_flags);
    report.threshold = compute_threshold(profile, config.threshold_coefficient);
    const auto moments = detail::profile_moments(profile);
    report.profile_mean = moments.mean;
    report.profile_std = moments.std_dev;

    std::vector<char> flagged_flat(series.total(), 0);
    for (const PreFlag& f : report.pre_flags) {
        const std::size_t flat0 = (f.channel - 1) * series.n + f.sample - 1;
        if (flat0 < flagged_flat.size()) flagged_flat[flat0] = 1;
    }
    const auto fully_pre_flagged = [&](std::size_t u0) {
        for (std::size_t k = 0; k < m; ++k)
            if (!flagged_flat[u0 + k]) return false;
        return true;
    };

    std::vector<char> masked(count, 0);
    if (!report.pre_flags.empty())
        for (std::size_t u0 = 0; u0 < count; ++u0)
            if (profile.evaluated(u0) && fully_pre_flagged(u0)) masked[u0] = 1;

    const auto open_at = [&](std::size_t u0) { return profile.evaluated(u0) && !masked[u0]; };

    while (report.anomalies.size() < config.max_anomalies) {
        std::size_t peak0 = count;
        double peak_value = -std::numeric_limits<double>::infinity();
        for (std::size_t u0 = 0; u0 < count; ++u0) {
            if (open_at(u0) && profile.values[u0] > peak_value) {
                peak_value = profile.values[u0];
                peak0 = u0;
            }
        }
        if (peak0 == count || !(peak_value > report.threshold)) break;

        std::size_t lo0 = peak0, hi0 = peak0;
        for (std::size_t j = 1;; ++j) {
            const std::size_t offset = j * step;
            if (offset > peak0) break;
            const std::size_t p = peak0 - offset;
            if (!open_at(p) || !(profile.values[p] > report.threshold)) break;
            lo0 = p;
        }
        for (std::size_t j = 1;; ++j) {
            const std::size_t p = peak0 + j * step;
            if (p >= count || !open_at(p) || !(profile.values[p] > report.threshold)) break;
            hi0 = p;
        }

        const std::size_t mask_lo = lo0 >= m - 1 ? lo0 - (m - 1) : 0;
        const std::size_t mask_hi = std::min(count - 1, hi0 + (m - 1));
        for (std::size_t u0 = mask_lo; u0 <= mask_hi; ++u0) masked[u0] = 1;

        Anomaly a;
        a.flat_start = lo0 + 1;
        a.flat_end = hi0 + m;  // last sample covered by the subsequence at hi0
        a.peak_value = peak_value;
        a.peak_index = peak0 + 1;
        a.channel_locations = locate(series, a.flat_start, a.flat_end);
        report.anomalies.push_back(std::move(a));
    }

    // drop anomalies that lie entirely inside zero-filled regions; those are
    // already reported through pre_flags
    if (!report.pre_flags.empty()) {
        std::erase_if(report.anomalies, [&](const Anomaly& a) {
            for (std::size_t flat0 = a.flat_start - 1; flat0 <= a.flat_end - 1; ++flat0)
                if (!flagged_flat[flat0]) return false;
            return true;
        });
    }

    // spans are disjoint by construction; merge defensively so the report
    // invariant holds even if probing rules change
    std::sort(report.anomalies.begin(), report.anomalies.end(),
              [](const Anomaly& a, const Anomaly& b) { return a.flat_start < b.flat_start; });
    std::vector<Anomaly> merged;
    for (Anomaly& a : report.anomalies) {
        if (!merged.empty() && a.flat_start <= merged.back().flat_end) {
            Anomaly& prev = merged.back();
            prev.flat_end = std::max(prev.flat_end, a.flat_end);
            if (a.peak_value > prev.peak_value ||
                (a.peak_value == prev.peak_value && a.peak_index < prev.peak_index)) {
                prev.peak_value = a.peak_value;
                prev.peak_index = a.peak_index;
            }
            prev.channel_locations = locate(series, prev.flat_start, prev.flat_end);
        } else {
            merged.push_back(std::move(a));
        }
    }
    report.anomalies = std::move(merged);
    return report;
}

/// Per-window confusion counts against ground truth. A truth span counts as
/// detected when some reported anomaly overlaps it by at least one sample on
/// the same channel; fa records whether the window raised any alarm matching
/// no truth (for clean windows: any alarm at all).
struct WindowConfusion {
    std::size_t ta = 0;
    std::size_t fn = 0;
    std::size_t fa = 0;
};

inline WindowConfusion match_report(const DetectionReport& report,
                                    const std::vector<BadDataScenario>& truth) {
    const auto overlaps = [](const ChannelSpan& span, const BadDataScenario& t) {
        if (span.channel != t.channel) return false;
        const std::size_t t_first = t.start_sample;
        const std::size_t t_last = t.start_sample + t.span - 1;
        return span.first_sample <= t_last && t_first <= span.last_sample;
    };

    WindowConfusion counts;
    std::vector<char> anomaly_matched(report.anomalies.size(), 0);
    for (const BadDataScenario& t : truth) {
        bool detected = false;
        for (std::size_t a = 0; a < report.anomalies.size(); ++a) {
            for (const ChannelSpan& span : report.anomalies[a].channel_locations) {
                if (overlaps(span, t)) {
                    detected = true;
                    anomaly_matched[a] = 1;
                }
            }
        }
        detected ? ++counts.ta : ++counts.fn;
    }
    for (std::size_t a = 0; a < report.anomalies.size(); ++a) {
        if (!anomaly_matched[a]) {
            counts.fa = 1;
            break;
        }
    }
    return counts;
}

} // namespace stnn
