#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stnn/fft.hpp"
#include "stnn/measurement.hpp"

namespace stnn {

/// Standard deviations at or below this count as "constant" for the
/// degenerate-distance rules. Input is expected in per-unit scale.
inline constexpr double k_sigma_floor = 1e-12;

namespace detail {

// Kahan-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline double dot_product(const std::vector<double>& x, std::size_t a0, std::size_t b0,
                          std::size_t m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += x[a0 + k] * x[b0 + k];
    return acc;
}

} // namespace detail

/// Per-subsequence moving mean and population standard deviation, computed
/// once per series from cumulative sums. Sums run over values shifted by the
/// series mean, which keeps the variance subtraction well conditioned for
/// per-unit data. Bit-identical sample runs are detected exactly so that
/// frozen segments always classify as constant (std == 0).
struct MovingStats {
    std::vector<double> means;
    std::vector<double> stds;

    static MovingStats compute(const std::vector<double>& data, std::size_t m) {
        const std::size_t N = data.size();
        if (m < 1 || m > N) throw std::invalid_argument("MovingStats: invalid subsequence length");
        const std::size_t count = N - m + 1;

        double shift = 0.0;
        {
            detail::CompensatedSum s;
            for (double v : data) s.add(v);
            shift = s.sum / static_cast<double>(N);
        }

        std::vector<double> cum1(N + 1, 0.0), cum2(N + 1, 0.0);
        detail::CompensatedSum s1, s2;
        for (std::size_t k = 0; k < N; ++k) {
            const double d = data[k] - shift;
            s1.add(d);
            s2.add(d * d);
            cum1[k + 1] = s1.sum;
            cum2[k + 1] = s2.sum;
        }

        // run[k] = length of the maximal constant run ending at k
        std::vector<std::size_t> run(N, 1);
        for (std::size_t k = 1; k < N; ++k) run[k] = (data[k] == data[k - 1]) ? run[k - 1] + 1 : 1;

        MovingStats stats;
        stats.means.resize(count);
        stats.stds.resize(count);
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t u = 0; u < count; ++u) {
            const double mean_shifted = (cum1[u + m] - cum1[u]) * inv_m;
            stats.means[u] = shift + mean_shifted;
            if (run[u + m - 1] >= m) {
                stats.stds[u] = 0.0;
                continue;
            }
            double var = (cum2[u + m] - cum2[u]) * inv_m - mean_shifted * mean_shifted;
            stats.stds[u] = var > 0.0 ? std::sqrt(var) : 0.0;
        }
        return stats;
    }
};

/// Sliding dot products of one query subsequence against every subsequence
/// of the series: products[v-1] holds the inner product with the
/// subsequence starting at 1-based position v.
struct DotProductRow {
    std::size_t query_start = 0;  // 1-based
    std::vector<double> products;
};

/// Correlation-form z-normalized distance between subsequences u and v
/// (1-based) given their dot product. Degenerate rules: both constant -> 0,
/// exactly one constant -> sqrt(2m). The radicand is clamped to [0, 4m] to
/// absorb correlations marginally past +-1.
inline double znorm_distance(double dot_uv, const MovingStats& stats, std::size_t u, std::size_t v,
                             std::size_t m) {
    const double sigma_u = stats.stds[u - 1];
    const double sigma_v = stats.stds[v - 1];
    const bool const_u = sigma_u <= k_sigma_floor;
    const bool const_v = sigma_v <= k_sigma_floor;
    const double md = static_cast<double>(m);
    if (const_u && const_v) return 0.0;
    if (const_u || const_v) return std::sqrt(2.0 * md);

    const double corr = (dot_uv - md * stats.means[u - 1] * stats.means[v - 1]) / (md * sigma_u * sigma_v);
    double radicand = 2.0 * md * (1.0 - corr);
    if (radicand < 0.0) radicand = 0.0;
    if (radicand > 4.0 * md) radicand = 4.0 * md;
    return std::sqrt(radicand);
}

/// Dot products of an arbitrary query against every length-m window of the
/// series, via the padded / mirrored transform trick: the series is
/// zero-padded, the query is reversed and zero-padded, both are transformed,
/// multiplied elementwise and inverted; the wanted products sit at offsets
/// m-1 .. m-1+(N-m) of the result. The transform length is rounded up to a
/// power of two, which only adds padding and leaves those offsets unchanged.
inline std::vector<double> sliding_dot_products(const std::vector<double>& data,
                                                const std::vector<double>& query) {
    const std::size_t N = data.size();
    const std::size_t m = query.size();
    if (m < 1 || m > N) throw std::invalid_argument("sliding_dot_products: bad query length");

    const std::size_t L = next_pow2(2 * N);
    std::vector<std::complex<double>> padded(L), mirrored(L);
    for (std::size_t k = 0; k < N; ++k) padded[k] = data[k];
    for (std::size_t k = 0; k < m; ++k) mirrored[k] = query[m - 1 - k];

    fft_radix2(padded, false);
    fft_radix2(mirrored, false);
    for (std::size_t k = 0; k < L; ++k) padded[k] *= mirrored[k];
    fft_radix2(padded, true);

    std::vector<double> products(N - m + 1);
    for (std::size_t i = 0; i <= N - m; ++i) products[i] = padded[m - 1 + i].real();
    return products;
}

/// Batch dot products for the subsequence starting at 1-based position u.
inline DotProductRow fft_sliding_dot(const ConcatenatedSeries& series, std::size_t u, std::size_t m) {
    const std::size_t N = series.total();
    if (m < 1 || m > N || u < 1 || u > N - m + 1)
        throw std::out_of_range("fft_sliding_dot: query start " + std::to_string(u) + " out of range");

    const std::vector<double> query(series.data.begin() + (u - 1),
                                    series.data.begin() + (u - 1) + m);
    DotProductRow row;
    row.query_start = u;
    row.products = sliding_dot_products(series.data, query);
    return row;
}

/// Advances an exact dot-product row from query u to query u+1:
/// M[u+1][v+1] = M[u][v] - x[u]x[v] + x[u+m]x[v+m]. The first entry of the
/// new row has no predecessor and is computed directly.
inline DotProductRow recursive_dot_update(const DotProductRow& prev_row,
                                          const ConcatenatedSeries& series, std::size_t m) {
    const std::size_t N = series.total();
    const std::size_t count = N - m + 1;
    if (prev_row.products.size() != count)
        throw std::invalid_argument("recursive_dot_update: row size mismatch");
    if (prev_row.query_start + 1 > count)
        throw std::out_of_range("recursive_dot_update: no query after " +
                                std::to_string(prev_row.query_start));

    const auto& x = series.data;
    const std::size_t a0 = prev_row.query_start - 1;  // 0-based start of the previous query

    DotProductRow next;
    next.query_start = prev_row.query_start + 1;
    next.products.resize(count);
    next.products[0] = detail::dot_product(x, a0 + 1, 0, m);
    const double drop = x[a0];
    const double gain = x[a0 + m];
    for (std::size_t j = 1; j < count; ++j)
        next.products[j] = prev_row.products[j - 1] - drop * x[j - 1] + gain * x[j - 1 + m];
    return next;
}

/// Oracle distance row: explicit z-normalization of both subsequences and a
/// plain Euclidean norm, recomputed per pair. No FFT, no recursion; kept
/// deliberately independent of the fast pipeline.
inline std::vector<double> brute_force_distance_row(const ConcatenatedSeries& series, std::size_t u,
                                                    std::size_t m) {
    const std::size_t N = series.total();
    if (m < 1 || m > N || u < 1 || u > N - m + 1)
        throw std::out_of_range("brute_force_distance_row: query start out of range");
    const std::size_t count = N - m + 1;
    const auto& x = series.data;
    const double md = static_cast<double>(m);

    const auto direct_mean_std = [&](std::size_t start0) {
        double mean = 0.0;
        for (std::size_t k = 0; k < m; ++k) mean += x[start0 + k];
        mean /= md;
        double ss = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = x[start0 + k] - mean;
            ss += d * d;
        }
        return std::pair<double, double>(mean, std::sqrt(ss / md));
    };

    const auto [mu_u, sigma_u] = direct_mean_std(u - 1);
    const bool const_u = sigma_u <= k_sigma_floor;
    std::vector<double> zq(m, 0.0);
    if (!const_u)
        for (std::size_t k = 0; k < m; ++k) zq[k] = (x[u - 1 + k] - mu_u) / sigma_u;

    std::vector<double> row(count);
    for (std::size_t v0 = 0; v0 < count; ++v0) {
        const auto [mu_v, sigma_v] = direct_mean_std(v0);
        const bool const_v = sigma_v <= k_sigma_floor;
        if (const_u && const_v) {
            row[v0] = 0.0;
        } else if (const_u || const_v) {
            row[v0] = std::sqrt(2.0 * md);
        } else {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double d = zq[k] - (x[v0 + k] - mu_v) / sigma_v;
                acc += d * d;
            }
            row[v0] = std::sqrt(acc);
        }
    }
    return row;
}

} // namespace stnn
