#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stnn/distance.hpp"
#include "stnn/measurement.hpp"

namespace stnn {

/// Whether subsequences that straddle a channel boundary take part in the
/// profile. `include` is the literal reading of the extraction rule (every
/// start position is used); `exclude` drops them both as queries and as
/// neighbor candidates, since they mix two channels' dynamics.
enum class BoundaryPolicy { include, exclude };

/// Nearest-neighbor profile over all subsequences of the concatenated
/// series. Positions skipped under boundary_policy=exclude carry NaN in
/// `values` and 0 in `neighbor_index`; they are never reported as 0.
struct StnnProfile {
    std::vector<double> values;
    std::vector<std::size_t> neighbor_index;  // 1-based; 0 = not evaluated
    std::vector<char> spans_boundary;
    std::size_t m = 0;
    std::size_t exclusion_halfwidth = 0;
    BoundaryPolicy boundary_policy = BoundaryPolicy::include;

    std::size_t size() const { return values.size(); }
    bool evaluated(std::size_t u0) const { return !std::isnan(values[u0]); }

    static constexpr double not_evaluated() { return std::numeric_limits<double>::quiet_NaN(); }
};

namespace detail {

struct ProfileLayout {
    std::size_t count = 0;
    std::size_t exclusion = 0;
    std::vector<char> spans_boundary;
    std::vector<char> usable;  // query/candidate eligibility under the boundary policy

    ProfileLayout(const ConcatenatedSeries& series, std::size_t m, std::size_t exclusion_halfwidth,
                  BoundaryPolicy policy) {
        const std::size_t N = series.total();
        if (m < 3 || m > N)
            throw std::invalid_argument("profile: subsequence length " + std::to_string(m) +
                                        " outside [3, " + std::to_string(N) + "]");
        count = N - m + 1;
        if (count < 2) throw std::invalid_argument("profile: undefined, fewer than 2 subsequences");
        exclusion = exclusion_halfwidth;

        spans_boundary.assign(count, 0);
        for (std::size_t b : series.boundary_positions) {
            // positions u with u+1 <= b <= u+m-1 straddle boundary b
            const std::size_t lo = b >= m ? b - m + 1 : 1;
            for (std::size_t u = lo; u + 1 <= b && u <= count; ++u) spans_boundary[u - 1] = 1;
        }
        usable.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            usable[i] = (policy == BoundaryPolicy::include) || !spans_boundary[i];
    }

    bool admissible(std::size_t u0, std::size_t v0) const {
        if (!usable[v0]) return false;
        const std::size_t gap = u0 > v0 ? u0 - v0 : v0 - u0;
        return gap > exclusion;  // gap == 0 is the self match, always excluded
    }
};

} // namespace detail

/// Full self-join profile: one transform-based dot-product row for the first
/// query, the recursive update for every following row, minimum distance and
/// argmin per row. Ties break toward the smallest neighbor index. The
/// winning candidate's distance is re-evaluated from a directly computed dot
/// product, so reported values do not carry accumulated recursion error.
inline StnnProfile compute_profile(const ConcatenatedSeries& series, std::size_t m,
                                   std::size_t exclusion_halfwidth = 0,
                                   BoundaryPolicy policy = BoundaryPolicy::include) {
    const detail::ProfileLayout layout(series, m, exclusion_halfwidth, policy);
    const std::size_t count = layout.count;
    const auto& x = series.data;
    const double md = static_cast<double>(m);
    const double sqrt_2m = std::sqrt(2.0 * md);

    const MovingStats stats = MovingStats::compute(x, m);
    std::vector<char> is_const(count);
    std::vector<double> inv_sigma(count, 0.0), mean_over_sigma(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        is_const[i] = stats.stds[i] <= k_sigma_floor;
        if (!is_const[i]) {
            inv_sigma[i] = 1.0 / stats.stds[i];
            mean_over_sigma[i] = stats.means[i] * inv_sigma[i];
        }
    }

    StnnProfile profile;
    profile.m = m;
    profile.exclusion_halfwidth = exclusion_halfwidth;
    profile.boundary_policy = policy;
    profile.spans_boundary = layout.spans_boundary;
    profile.values.assign(count, StnnProfile::not_evaluated());
    profile.neighbor_index.assign(count, 0);

    std::vector<double> dots = fft_sliding_dot(series, 1, m).products;
    std::vector<double> next(count);

    for (std::size_t u0 = 0; u0 < count; ++u0) {
        if (u0 > 0) {
            // M[u][v] = M[u-1][v-1] - x[u-1]x[v-1] + x[u-1+m]x[v-1+m], 0-based starts
            next[0] = detail::dot_product(x, u0, 0, m);
            const double drop = x[u0 - 1];
            const double gain = x[u0 - 1 + m];
            for (std::size_t j = 1; j < count; ++j)
                next[j] = dots[j - 1] - drop * x[j - 1] + gain * x[j - 1 + m];
            dots.swap(next);
        }
        if (!layout.usable[u0]) continue;

        std::size_t best_v0 = count;  // sentinel: none
        double best_d = std::numeric_limits<double>::infinity();

        if (is_const[u0]) {
            // constant query: 0 against another constant, sqrt(2m) otherwise
            std::size_t first_any = count, first_const = count;
            for (std::size_t v0 = 0; v0 < count; ++v0) {
                if (!layout.admissible(u0, v0)) continue;
                if (first_any == count) first_any = v0;
                if (is_const[v0]) {
                    first_const = v0;
                    break;
                }
            }
            if (first_const != count) {
                best_v0 = first_const;
                best_d = 0.0;
            } else if (first_any != count) {
                best_v0 = first_any;
                best_d = sqrt_2m;
            }
        } else {
            const double isu_m = inv_sigma[u0] / md;
            const double mos_u = mean_over_sigma[u0];
            double best_corr = -std::numeric_limits<double>::infinity();
            std::size_t corr_v0 = count;
            std::size_t first_const = count;
            for (std::size_t v0 = 0; v0 < count; ++v0) {
                if (!layout.admissible(u0, v0)) continue;
                if (is_const[v0]) {
                    if (first_const == count) first_const = v0;
                    continue;
                }
                const double corr = dots[v0] * isu_m * inv_sigma[v0] - mos_u * mean_over_sigma[v0];
                if (corr > best_corr) {
                    best_corr = corr;
                    corr_v0 = v0;
                }
            }
            if (corr_v0 != count) {
                const double refined = detail::dot_product(x, u0, corr_v0, m);
                best_d = znorm_distance(refined, stats, u0 + 1, corr_v0 + 1, m);
                best_v0 = corr_v0;
            }
            if (first_const != count && (best_v0 == count || sqrt_2m < best_d ||
                                         (sqrt_2m == best_d && first_const < best_v0))) {
                best_v0 = first_const;
                best_d = sqrt_2m;
            }
        }

        if (best_v0 != count) {
            profile.values[u0] = best_d;
            profile.neighbor_index[u0] = best_v0 + 1;
        }
    }
    return profile;
}

/// Brute-force reference profile: explicit nested loops over all admissible
/// pairs with per-pair z-normalized Euclidean distances. Shares the
/// admissibility logic with compute_profile and nothing else. Intended for
/// series up to a few thousand samples.
inline StnnProfile self_join_oracle(const ConcatenatedSeries& series, std::size_t m,
                                    std::size_t exclusion_halfwidth = 0,
                                    BoundaryPolicy policy = BoundaryPolicy::include) {
    const detail::ProfileLayout layout(series, m, exclusion_halfwidth, policy);
    const std::size_t count = layout.count;
    const auto& x = series.data;
    const double md = static_cast<double>(m);
    const double sqrt_2m = std::sqrt(2.0 * md);

    StnnProfile profile;
    profile.m = m;
    profile.exclusion_halfwidth = exclusion_halfwidth;
    profile.boundary_policy = policy;
    profile.spans_boundary = layout.spans_boundary;
    profile.values.assign(count, StnnProfile::not_evaluated());
    profile.neighbor_index.assign(count, 0);

    std::vector<double> mu(count), sigma(count);
    for (std::size_t i = 0; i < count; ++i) {
        double mean = 0.0;
        for (std::size_t k = 0; k < m; ++k) mean += x[i + k];
        mean /= md;
        double ss = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = x[i + k] - mean;
            ss += d * d;
        }
        mu[i] = mean;
        sigma[i] = std::sqrt(ss / md);
    }

    std::vector<double> zq(m);
    for (std::size_t u0 = 0; u0 < count; ++u0) {
        if (!layout.usable[u0]) continue;
        const bool const_u = sigma[u0] <= k_sigma_floor;
        if (!const_u)
            for (std::size_t k = 0; k < m; ++k) zq[k] = (x[u0 + k] - mu[u0]) / sigma[u0];

        double best_d = std::numeric_limits<double>::infinity();
        std::size_t best_v0 = count;
        for (std::size_t v0 = 0; v0 < count; ++v0) {
            if (!layout.admissible(u0, v0)) continue;
            const bool const_v = sigma[v0] <= k_sigma_floor;
            double d;
            if (const_u && const_v) {
                d = 0.0;
            } else if (const_u || const_v) {
                d = sqrt_2m;
            } else {
                double acc = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double diff = zq[k] - (x[v0 + k] - mu[v0]) / sigma[v0];
                    acc += diff * diff;
                }
                d = std::sqrt(acc);
            }
            if (d < best_d) {
                best_d = d;
                best_v0 = v0;
            }
        }
        if (best_v0 != count) {
            profile.values[u0] = best_d;
            profile.neighbor_index[u0] = best_v0 + 1;
        }
    }
    return profile;
}

} // namespace stnn
