#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "helpers.hpp"
#include "stnn/measurement.hpp"

using Catch::Approx;
using namespace stnn;

namespace {

std::vector<Sample> make_rows(std::size_t n_b, std::size_t n, double dt,
                              double value = 1.0) {
    std::vector<Sample> rows(n);
    for (std::size_t j = 0; j < n; ++j) {
        rows[j].t = static_cast<double>(j) * dt;
        rows[j].values.assign(n_b, value);
    }
    return rows;
}

} // namespace

TEST_CASE("ingest builds windows with the expected shape", "[measurement]") {
    SECTION("5 channels x 500 samples at 100 Hz") {
        const auto w = ingest_window(make_rows(5, 500, 0.01), 0.01);
        REQUIRE(w.n_b == 5);
        REQUIRE(w.n == 500);
        REQUIRE(w.values.size() == 2500);
        REQUIRE(w.pre_flags.empty());
    }
    SECTION("7 channels x 400 samples at 25 Hz") {
        const auto w = ingest_window(make_rows(7, 400, 0.04), 0.04);
        REQUIRE(w.n_b == 7);
        REQUIRE(w.n == 400);
    }
    SECTION("NaN cell is zero-filled and pre-flagged") {
        auto rows = make_rows(3, 20, 0.01, 2.0);
        rows[4].values[1] = std::numeric_limits<double>::quiet_NaN();
        const auto w = ingest_window(rows, 0.01);
        REQUIRE(w.value(1, 4) == 0.0);
        REQUIRE(w.pre_flags.size() == 1);
        REQUIRE(w.pre_flags.front() == PreFlag{2, 5});
    }
}

TEST_CASE("ingest rejects malformed input", "[measurement]") {
    SECTION("ragged rows") {
        auto rows = make_rows(3, 10, 0.01);
        rows[5].values.pop_back();
        REQUIRE_THROWS_AS(ingest_window(rows, 0.01), std::invalid_argument);
    }
    SECTION("single channel") {
        REQUIRE_THROWS_AS(ingest_window(make_rows(1, 10, 0.01), 0.01), std::invalid_argument);
    }
    SECTION("too few samples for the requested minimum") {
        REQUIRE_THROWS_AS(ingest_window(make_rows(3, 10, 0.01), 0.01, 50), std::invalid_argument);
    }
    SECTION("timestamp spacing off by more than 1%") {
        auto rows = make_rows(2, 10, 0.01);
        rows[7].t += 0.002;
        REQUIRE_THROWS_AS(ingest_window(rows, 0.01), std::invalid_argument);
    }
}

TEST_CASE("normalize_per_channel divides by the reference", "[measurement]") {
    SECTION("self-reference maps a constant channel to 1") {
        auto w = test_support::window_from_channels({{230.0, 230.0, 230.0}, {10.0, 10.0, 10.0}});
        const auto out = normalize_per_channel(w, {230.0, 10.0});
        for (std::size_t j = 0; j < 3; ++j) {
            REQUIRE(out.value(0, j) == Approx(1.0));
            REQUIRE(out.value(1, j) == Approx(1.0));
        }
    }
    SECTION("elementwise division") {
        auto w = test_support::window_from_channels({{1.0, 2.0, 4.0}, {3.0, 3.0, 3.0}});
        const auto out = normalize_per_channel(w, {2.0, 3.0});
        REQUIRE(out.value(0, 0) == Approx(0.5));
        REQUIRE(out.value(0, 1) == Approx(1.0));
        REQUIRE(out.value(0, 2) == Approx(2.0));
    }
    SECTION("default reference is the median of the first 10% of samples") {
        std::vector<std::vector<double>> channels(2, std::vector<double>(100, 7.0));
        for (std::size_t j = 0; j < 10; ++j) channels[0][j] = 1.05;
        auto out = normalize_per_channel(test_support::window_from_channels(channels));
        REQUIRE(out.value(0, 50) == Approx(7.0 / 1.05));
    }
    SECTION("zero reference names the channel") {
        auto w = test_support::window_from_channels({{1.0, 2.0}, {3.0, 4.0}});
        REQUIRE_THROWS_WITH(normalize_per_channel(w, {1.0, 0.0}),
                            Catch::Matchers::ContainsSubstring("ch2"));
    }
}

TEST_CASE("concatenate flattens row-major with boundary positions", "[measurement]") {
    const auto w = test_support::window_from_channels({{1, 2, 3}, {4, 5, 6}});
    const auto s = concatenate(w);
    REQUIRE(s.data == std::vector<double>{1, 2, 3, 4, 5, 6});
    REQUIRE(s.boundary_positions == std::vector<std::size_t>{4});

    SECTION("flat index mapping at n=500") {
        ConcatenatedSeries big;
        big.n = 500;
        big.n_b = 5;
        big.data.resize(2500);
        REQUIRE(big.channel_of(501) == 2);
        REQUIRE(big.sample_of(501) == 1);
        REQUIRE(big.channel_of(500) == 1);
        REQUIRE(big.sample_of(500) == 500);
    }
}

TEST_CASE("locate splits flat ranges at channel boundaries", "[measurement]") {
    ConcatenatedSeries s;
    s.n = 500;
    s.n_b = 5;
    s.data.resize(2500);
    for (std::size_t i = 1; i < 5; ++i) s.boundary_positions.push_back(i * 500 + 1);

    SECTION("boundary split") {
        const auto spans = locate(s, 498, 503);
        REQUIRE(spans.size() == 2);
        REQUIRE(spans[0] == ChannelSpan{1, 498, 500});
        REQUIRE(spans[1] == ChannelSpan{2, 1, 3});
    }
    SECTION("single-channel range") {
        const auto spans = locate(s, 1, 50);
        REQUIRE(spans.size() == 1);
        REQUIRE(spans[0] == ChannelSpan{1, 1, 50});
    }
    SECTION("last element") {
        const auto spans = locate(s, 2500, 2500);
        REQUIRE(spans.size() == 1);
        REQUIRE(spans[0] == ChannelSpan{5, 500, 500});
    }
    SECTION("out of range") {
        REQUIRE_THROWS_AS(locate(s, 0, 10), std::out_of_range);
        REQUIRE_THROWS_AS(locate(s, 1, 2501), std::out_of_range);
    }
}

TEST_CASE("flat index round trip and value preservation", "[measurement]") {
    std::mt19937_64 rng(17);
    const auto values = test_support::random_values(rng, 4 * 37);
    std::vector<std::vector<double>> channels;
    for (std::size_t i = 0; i < 4; ++i)
        channels.emplace_back(values.begin() + i * 37, values.begin() + (i + 1) * 37);
    const auto w = test_support::window_from_channels(channels);
    const auto s = concatenate(w);

    SECTION("locate then forward mapping recovers every k") {
        for (std::size_t k = 1; k <= s.total(); ++k) {
            const auto spans = locate(s, k, k);
            REQUIRE(spans.size() == 1);
            REQUIRE(s.flat_index(spans[0].channel, spans[0].first_sample) == k);
        }
    }
    SECTION("concatenation preserves the value sum") {
        const double window_sum = std::accumulate(w.values.begin(), w.values.end(), 0.0);
        const double series_sum = std::accumulate(s.data.begin(), s.data.end(), 0.0);
        REQUIRE(series_sum == Approx(window_sum));
    }
}

TEST_CASE("boundary-spanning subsequence count", "[measurement]") {
    const std::size_t n_b = 3, n = 40, m = 7;
    std::mt19937_64 rng(5);
    std::vector<std::vector<double>> channels;
    for (std::size_t i = 0; i < n_b; ++i) channels.push_back(test_support::random_values(rng, n));
    const auto s = concatenate(test_support::window_from_channels(channels));

    std::size_t spanning = 0;
    for (std::size_t u = 1; u + m - 1 <= s.total(); ++u)
        if (subsequence_ref(s, u, m).spans_boundary) ++spanning;
    REQUIRE(spanning == (n_b - 1) * (m - 1));

    REQUIRE_THROWS_AS(subsequence_ref(s, s.total() - m + 2, m), std::out_of_range);
}
