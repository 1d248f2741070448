#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stnn {

/// A cell that arrived as NaN/missing and was zero-filled at ingestion.
/// Coordinates are 1-based, matching every reported index in this library.
struct PreFlag {
    std::size_t channel = 0;
    std::size_t sample = 0;

    friend bool operator==(const PreFlag&, const PreFlag&) = default;
};

/// One input row: a timestamp plus the simultaneous value of every channel.
struct Sample {
    double t = 0.0;
    std::vector<double> values;
};

/// One observation window of multi-channel measurements, stored row-major
/// (channel-major). Values are free of NaN after ingestion; cells that
/// arrived missing are zero-filled and listed in pre_flags.
struct MeasurementWindow {
    std::size_t n_b = 0;  // channel count
    std::size_t n = 0;    // samples per channel
    double dt = 0.0;      // sampling interval, seconds
    std::vector<std::string> channel_ids;
    std::vector<double> values;  // n_b * n, row-major
    std::vector<PreFlag> pre_flags;

    double value(std::size_t channel0, std::size_t sample0) const {
        return values[channel0 * n + sample0];
    }
    double& value(std::size_t channel0, std::size_t sample0) {
        return values[channel0 * n + sample0];
    }
    double duration() const { return static_cast<double>(n) * dt; }
};

/// All channels of a window laid end to end into one flat series.
/// boundary_positions holds the 1-based flat index at which each channel
/// after the first begins: {n+1, 2n+1, ...}.
struct ConcatenatedSeries {
    std::vector<double> data;
    std::size_t n = 0;
    std::size_t n_b = 0;
    std::vector<std::size_t> boundary_positions;

    std::size_t total() const { return data.size(); }

    /// Channel of 1-based flat position k: ceil(k / n).
    std::size_t channel_of(std::size_t k) const { return (k + n - 1) / n; }
    /// Within-channel sample of 1-based flat position k.
    std::size_t sample_of(std::size_t k) const { return k - (channel_of(k) - 1) * n; }
    /// 1-based flat position of (channel i, sample j), both 1-based.
    std::size_t flat_index(std::size_t i, std::size_t j) const { return (i - 1) * n + j; }
};

/// A length-m subsequence of the concatenated series, identified by its
/// 1-based start position.
struct SubsequenceRef {
    std::size_t start = 0;
    std::size_t length = 0;
    bool spans_boundary = false;
};

/// A contiguous run of samples on one channel; all fields 1-based, inclusive.
struct ChannelSpan {
    std::size_t channel = 0;
    std::size_t first_sample = 0;
    std::size_t last_sample = 0;

    friend bool operator==(const ChannelSpan&, const ChannelSpan&) = default;
};

/// Builds a window from raw rows. NaN/inf cells are replaced by zero and
/// recorded as pre-flags. Timestamps must be strictly increasing with
/// spacing dt to within 1% relative tolerance.
///
/// min_samples is the smallest acceptable row count; callers that already
/// know their subsequence length pass it here so undersized input fails at
/// the door instead of at profiling time.
inline MeasurementWindow ingest_window(const std::vector<Sample>& rows, double dt,
                                       std::size_t min_samples = 3,
                                       std::vector<std::string> channel_ids = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("ingest: dt must be positive");
    if (rows.size() < std::max<std::size_t>(min_samples, 1))
        throw std::invalid_argument("ingest: window has " + std::to_string(rows.size()) +
                                    " samples, need at least " + std::to_string(min_samples));

    const std::size_t n_b = rows.front().values.size();
    if (n_b < 2) throw std::invalid_argument("ingest: need at least 2 channels, got " + std::to_string(n_b));

    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].values.size() != n_b)
            throw std::invalid_argument("ingest: row " + std::to_string(r + 1) + " has " +
                                        std::to_string(rows[r].values.size()) + " channels, expected " +
                                        std::to_string(n_b));
        if (r > 0) {
            const double gap = rows[r].t - rows[r - 1].t;
            if (!(gap > 0.0) || std::abs(gap - dt) > 0.01 * dt)
                throw std::invalid_argument("ingest: timestamp spacing " + std::to_string(gap) +
                                            " at row " + std::to_string(r + 1) +
                                            " deviates from dt=" + std::to_string(dt));
        }
    }

    MeasurementWindow w;
    w.n_b = n_b;
    w.n = rows.size();
    w.dt = dt;
    if (channel_ids.empty()) {
        for (std::size_t i = 1; i <= n_b; ++i) w.channel_ids.push_back("ch" + std::to_string(i));
    } else {
        if (channel_ids.size() != n_b)
            throw std::invalid_argument("ingest: channel id count does not match channel count");
        w.channel_ids = std::move(channel_ids);
    }

    w.values.resize(n_b * w.n);
    for (std::size_t j = 0; j < w.n; ++j) {
        for (std::size_t i = 0; i < n_b; ++i) {
            const double v = rows[j].values[i];
            if (std::isfinite(v)) {
                w.value(i, j) = v;
            } else {
                w.value(i, j) = 0.0;
                w.pre_flags.push_back({i + 1, j + 1});
            }
        }
    }
    return w;
}

/// Divides each channel by a steady-state reference. With no references
/// supplied, each channel uses the median of its first 10% of samples
/// (at least one), which is robust to early spikes.
inline MeasurementWindow normalize_per_channel(const MeasurementWindow& window,
                                               std::vector<double> reference = {}) {
    if (reference.empty()) {
        const std::size_t head = std::max<std::size_t>(1, window.n / 10);
        reference.resize(window.n_b);
        std::vector<double> buf(head);
        for (std::size_t i = 0; i < window.n_b; ++i) {
            for (std::size_t j = 0; j < head; ++j) buf[j] = window.value(i, j);
            std::sort(buf.begin(), buf.end());
            reference[i] = (head % 2 == 1) ? buf[head / 2]
                                           : 0.5 * (buf[head / 2 - 1] + buf[head / 2]);
        }
    }
    if (reference.size() != window.n_b)
        throw std::invalid_argument("normalize: reference count does not match channel count");

    MeasurementWindow out = window;
    for (std::size_t i = 0; i < window.n_b; ++i) {
        if (reference[i] == 0.0 || !std::isfinite(reference[i]))
            throw std::invalid_argument("normalize: degenerate steady-state reference for channel " +
                                        window.channel_ids[i]);
        const double inv = 1.0 / reference[i];
        for (std::size_t j = 0; j < window.n; ++j) out.value(i, j) = window.value(i, j) * inv;
    }
    return out;
}

/// Row-major flattening of the window into one series.
inline ConcatenatedSeries concatenate(const MeasurementWindow& window) {
    ConcatenatedSeries s;
    s.data = window.values;
    s.n = window.n;
    s.n_b = window.n_b;
    for (std::size_t i = 1; i < window.n_b; ++i) s.boundary_positions.push_back(i * window.n + 1);
    return s;
}

/// Reference to the subsequence starting at 1-based flat position u.
inline SubsequenceRef subsequence_ref(const ConcatenatedSeries& series, std::size_t u, std::size_t m) {
    const std::size_t N = series.total();
    if (m == 0 || m > N || u < 1 || u > N - m + 1)
        throw std::out_of_range("subsequence: start " + std::to_string(u) + " with length " +
                                std::to_string(m) + " out of range for N=" + std::to_string(N));
    SubsequenceRef ref;
    ref.start = u;
    ref.length = m;
    ref.spans_boundary = series.channel_of(u) != series.channel_of(u + m - 1);
    return ref;
}

/// Maps a 1-based inclusive flat range back to per-channel sample ranges,
/// splitting at channel boundaries.
inline std::vector<ChannelSpan> locate(const ConcatenatedSeries& series, std::size_t start,
                                       std::size_t end) {
    if (start < 1 || end < start || end > series.total())
        throw std::out_of_range("locate: range [" + std::to_string(start) + ", " + std::to_string(end) +
                                "] out of bounds for N=" + std::to_string(series.total()));
    std::vector<ChannelSpan> spans;
    std::size_t cursor = start;
    while (cursor <= end) {
        const std::size_t ch = series.channel_of(cursor);
        const std::size_t channel_end = ch * series.n;
        const std::size_t piece_end = std::min(end, channel_end);
        spans.push_back({ch, series.sample_of(cursor), series.sample_of(piece_end)});
        cursor = piece_end + 1;
    }
    return spans;
}

} // namespace stnn
