#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "stnn/measurement.hpp"
#include "stnn/rng.hpp"

namespace test_support {

/// Wraps a flat value vector as a single-channel concatenated series.
inline stnn::ConcatenatedSeries series_from(std::vector<double> data) {
    stnn::ConcatenatedSeries s;
    s.n = data.size();
    s.n_b = 1;
    s.data = std::move(data);
    return s;
}

/// Multi-channel series with explicit boundaries, channels laid end to end.
inline stnn::ConcatenatedSeries series_from_channels(const std::vector<std::vector<double>>& channels) {
    stnn::ConcatenatedSeries s;
    s.n_b = channels.size();
    s.n = channels.front().size();
    for (const auto& row : channels) s.data.insert(s.data.end(), row.begin(), row.end());
    for (std::size_t i = 1; i < s.n_b; ++i) s.boundary_positions.push_back(i * s.n + 1);
    return s;
}

inline stnn::MeasurementWindow window_from_channels(const std::vector<std::vector<double>>& channels,
                                                    double dt = 0.01) {
    stnn::MeasurementWindow w;
    w.n_b = channels.size();
    w.n = channels.front().size();
    w.dt = dt;
    for (std::size_t i = 1; i <= w.n_b; ++i) w.channel_ids.push_back("ch" + std::to_string(i));
    for (const auto& row : channels) w.values.insert(w.values.end(), row.begin(), row.end());
    return w;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t count, double lo = -1.0,
                                         double hi = 1.0) {
    std::vector<double> out(count);
    for (double& v : out) v = stnn::uniform_in(rng, lo, hi);
    return out;
}

/// Direct O(N*m) sliding dot products, the oracle for the transform path.
inline std::vector<double> naive_dot_row(const std::vector<double>& x, std::size_t u0,
                                         std::size_t m) {
    const std::size_t count = x.size() - m + 1;
    std::vector<double> row(count, 0.0);
    for (std::size_t v0 = 0; v0 < count; ++v0)
        for (std::size_t k = 0; k < m; ++k) row[v0] += x[u0 + k] * x[v0 + k];
    return row;
}

} // namespace test_support
