#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnn/detector.hpp"
#include "stnn/measurement.hpp"
#include "stnn/profile.hpp"

namespace stnn {

/// Sliding-window processing parameters. The subsequence length is derived
/// per window as floor(window_samples * m_fraction), clamped to [3, N].
struct StreamConfig {
    double window_seconds = 5.0;
    double step_seconds = 0.5;
    double m_fraction = 0.1;
    DetectionConfig detection;
    std::size_t exclusion_halfwidth = 0;
    BoundaryPolicy boundary_policy = BoundaryPolicy::include;
    bool normalize = true;
};

/// A deduplicated detection across overlapping windows. Sample coordinates
/// are absolute (1-based from the start of the feed, per channel).
struct Alert {
    std::size_t channel = 0;  // 1-based
    std::string channel_id;
    std::size_t first_sample = 0;
    std::size_t last_sample = 0;
    double peak_value = 0.0;
    std::size_t first_window = 0;  // index of the window that first saw it
    double first_seen_time = 0.0;  // timestamp of that window's start
};

struct StreamResult {
    std::vector<DetectionReport> reports;
    std::vector<Alert> alerts;
    std::size_t rejected_rows = 0;  // late or duplicate samples dropped
    std::size_t gap_filled_rows = 0;
};

namespace detail {

inline bool spans_mergeable(std::size_t a_first, std::size_t a_last, std::size_t b_first,
                            std::size_t b_last) {
    const std::size_t lo = std::max(a_first, b_first);
    const std::size_t hi = std::min(a_last, b_last);
    if (lo > hi) return false;
    const std::size_t overlap = hi - lo + 1;
    const std::size_t shorter = std::min(a_last - a_first, b_last - b_first) + 1;
    return 2 * overlap >= shorter;  // at least 50% of the shorter span
}

} // namespace detail

/// Folds one detection span into the alert list: merged into an existing
/// alert on the same channel when their spans overlap by at least half of
/// the shorter one, appended otherwise. First-seen bookkeeping survives the
/// merge.
inline void absorb_alert(std::vector<Alert>& alerts, const Alert& candidate) {
    for (Alert& a : alerts) {
        if (a.channel == candidate.channel &&
            detail::spans_mergeable(a.first_sample, a.last_sample, candidate.first_sample,
                                    candidate.last_sample)) {
            a.first_sample = std::min(a.first_sample, candidate.first_sample);
            a.last_sample = std::max(a.last_sample, candidate.last_sample);
            a.peak_value = std::max(a.peak_value, candidate.peak_value);
            if (candidate.first_window < a.first_window) {
                a.first_window = candidate.first_window;
                a.first_seen_time = candidate.first_seen_time;
            }
            return;
        }
    }
    alerts.push_back(candidate);
}

/// Single merge pass followed by re-passes until a fixpoint: absorbing one
/// span can widen an alert enough to capture another, so one pass is not
/// idempotent on its own.
inline std::vector<Alert> merge_alerts(std::vector<Alert> alerts) {
    while (true) {
        std::vector<Alert> merged;
        for (const Alert& a : alerts) absorb_alert(merged, a);
        if (merged.size() == alerts.size()) return merged;
        alerts = std::move(merged);
    }
}

/// Turns an ordered sample feed into per-window detection reports plus
/// merged alerts. Feed gaps are filled with NaN rows (zero-filled and
/// pre-flagged downstream); late or duplicate samples are dropped.
class StreamProcessor {
public:
    StreamProcessor(double dt, StreamConfig config, std::vector<std::string> channel_ids = {})
        : dt_(dt), config_(std::move(config)), channel_ids_(std::move(channel_ids)) {
        if (!(dt > 0.0)) throw std::invalid_argument("stream: dt must be positive");
        window_samples_ = static_cast<std::size_t>(std::llround(config_.window_seconds / dt));
        step_samples_ = static_cast<std::size_t>(std::llround(config_.step_seconds / dt));
        if (window_samples_ < 3) throw std::invalid_argument("stream: window too short");
        if (step_samples_ < 1 || step_samples_ > window_samples_)
            throw std::invalid_argument("stream: step must be in (0, window]");
    }

    std::size_t window_samples() const { return window_samples_; }
    std::size_t step_samples() const { return step_samples_; }

    /// Feeds one row; returns a report when a window completed.
    std::optional<DetectionReport> push(const Sample& row) {
        if (have_last_t_) {
            const double expected = last_t_ + dt_;
            if (row.t < expected - 0.49 * dt_) {
                ++rejected_rows_;
                return std::nullopt;
            }
            double fill_t = expected;
            while (row.t > fill_t + 0.49 * dt_) {
                Sample gap;
                gap.t = fill_t;
                gap.values.assign(row.values.size(), std::numeric_limits<double>::quiet_NaN());
                buffer_.push_back(std::move(gap));
                ++gap_filled_rows_;
                fill_t += dt_;
                if (gap_filled_rows_ > 1000000)
                    throw std::runtime_error("stream: timestamp gap too large to zero-fill");
            }
        }
        last_t_ = row.t;
        have_last_t_ = true;
        buffer_.push_back(row);
        return process_ready();
    }

    std::size_t rejected_rows() const { return rejected_rows_; }
    std::size_t gap_filled_rows() const { return gap_filled_rows_; }
    std::size_t windows_emitted() const { return windows_emitted_; }
    std::vector<Alert> alerts() const { return merge_alerts(alerts_); }

private:
    std::optional<DetectionReport> process_ready() {
        if (buffer_.size() < window_samples_) return std::nullopt;

        std::vector<Sample> rows(buffer_.begin(), buffer_.begin() + window_samples_);
        const double window_start_time = rows.front().t;
        const std::size_t window_start_row = consumed_rows_;

        MeasurementWindow window = ingest_window(rows, dt_, 3, channel_ids_);
        if (config_.normalize) window = normalize_per_channel(window);
        const ConcatenatedSeries series = concatenate(window);

        std::size_t m = static_cast<std::size_t>(
            static_cast<double>(window_samples_) * config_.m_fraction);
        m = std::max<std::size_t>(3, std::min(m, series.total()));

        const StnnProfile profile =
            compute_profile(series, m, config_.exclusion_halfwidth, config_.boundary_policy);
        DetectionReport report = detect(profile, series, config_.detection,
                                        "w" + std::to_string(windows_emitted_), window.pre_flags);

        for (const Anomaly& anomaly : report.anomalies) {
            for (const ChannelSpan& span : anomaly.channel_locations) {
                Alert candidate;
                candidate.channel = span.channel;
                candidate.channel_id = window.channel_ids[span.channel - 1];
                candidate.first_sample = window_start_row + span.first_sample;
                candidate.last_sample = window_start_row + span.last_sample;
                candidate.peak_value = anomaly.peak_value;
                candidate.first_window = windows_emitted_;
                candidate.first_seen_time = window_start_time;
                absorb_alert(alerts_, candidate);
            }
        }

        ++windows_emitted_;
        consumed_rows_ += step_samples_;
        buffer_.erase(buffer_.begin(), buffer_.begin() + step_samples_);
        return report;
    }

    double dt_;
    StreamConfig config_;
    std::vector<std::string> channel_ids_;
    std::size_t window_samples_ = 0;
    std::size_t step_samples_ = 0;
    std::deque<Sample> buffer_;
    std::vector<Alert> alerts_;
    std::size_t consumed_rows_ = 0;
    std::size_t windows_emitted_ = 0;
    std::size_t rejected_rows_ = 0;
    std::size_t gap_filled_rows_ = 0;
    double last_t_ = 0.0;
    bool have_last_t_ = false;
};

inline StreamResult run_stream(const std::vector<Sample>& feed, double dt, const StreamConfig& config,
                               std::vector<std::string> channel_ids = {}) {
    if (feed.empty()) throw std::invalid_argument("stream: empty feed");
    StreamProcessor proc(dt, config, std::move(channel_ids));
    StreamResult result;
    for (const Sample& row : feed) {
        if (auto report = proc.push(row)) result.reports.push_back(std::move(*report));
    }
    result.alerts = proc.alerts();
    result.rejected_rows = proc.rejected_rows();
    result.gap_filled_rows = proc.gap_filled_rows();
    return result;
}

} // namespace stnn
