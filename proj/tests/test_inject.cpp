#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "stnn/inject.hpp"

using Catch::Approx;
using namespace stnn;

namespace {

MeasurementWindow flat_window(double level = 1.0) {
    return test_support::window_from_channels(
        {std::vector<double>(100, level), std::vector<double>(100, level)});
}

} // namespace

TEST_CASE("spike is an additive rectangular pulse", "[inject]") {
    BadDataScenario s{BadDataKind::spike, 1, 40, 1, -0.3, {}, 0};
    const auto result = inject(flat_window(), s);
    REQUIRE(result.window.value(0, 39) == Approx(0.7).margin(1e-12));
    REQUIRE(result.window.value(0, 38) == Approx(1.0));
    REQUIRE(result.window.value(0, 40) == Approx(1.0));
    REQUIRE(result.truth.size() == 1);
    REQUIRE(result.truth.front().channel == 1);
}

TEST_CASE("repeated freezes the value immediately before the span", "[inject]") {
    std::mt19937_64 rng(8);
    auto window = test_support::window_from_channels(
        {test_support::random_values(rng, 100, 0.9, 1.1), test_support::random_values(rng, 100)});

    SECTION("mid-window span of 40") {
        BadDataScenario s{BadDataKind::repeated, 1, 30, 40, 0.0, {}, 0};
        const auto result = inject(window, s);
        const double frozen = window.value(0, 28);
        double variance = 0.0;
        for (std::size_t k = 0; k < 40; ++k) {
            REQUIRE(result.window.value(0, 29 + k) == frozen);
            variance += (result.window.value(0, 29 + k) - frozen) *
                        (result.window.value(0, 29 + k) - frozen);
        }
        REQUIRE(variance == 0.0);
    }
    SECTION("span starting at sample 1 uses the channel's first value") {
        BadDataScenario s{BadDataKind::repeated, 1, 1, 10, 0.0, {}, 0};
        const auto result = inject(window, s);
        for (std::size_t k = 0; k < 10; ++k)
            REQUIRE(result.window.value(0, k) == window.value(0, 0));
    }
}

TEST_CASE("false injection replaces the span with the scaled source", "[inject]") {
    std::mt19937_64 rng(3);
    const auto window = flat_window();
    std::vector<double> segment = test_support::random_values(rng, 20, 0.8, 1.2);

    BadDataScenario s{BadDataKind::false_injection, 2, 50, 20, 1.1, segment, 0};
    const auto result = inject(window, s);
    for (std::size_t k = 0; k < 20; ++k)
        REQUIRE(result.window.value(1, 49 + k) == Approx(1.1 * segment[k]).margin(1e-12));
    REQUIRE(result.truth.front().span == 20);

    SECTION("segment length must equal the span") {
        s.span = 21;
        REQUIRE_THROWS_AS(inject(window, s), std::invalid_argument);
    }
}

TEST_CASE("data loss zeroes the span", "[inject]") {
    BadDataScenario s{BadDataKind::data_loss_zero, 1, 10, 5, 0.0, {}, 0};
    const auto result = inject(flat_window(), s);
    for (std::size_t k = 0; k < 5; ++k) REQUIRE(result.window.value(0, 9 + k) == 0.0);
}

TEST_CASE("injection leaves everything outside the span bit-identical", "[inject]") {
    std::mt19937_64 rng(55);
    const auto window = test_support::window_from_channels(
        {test_support::random_values(rng, 80), test_support::random_values(rng, 80),
         test_support::random_values(rng, 80)});
    BadDataScenario s{BadDataKind::spike, 2, 30, 3, 0.25, {}, 0};

    const auto once = inject(window, s);
    const auto twice = inject(window, s);
    REQUIRE(once.window.values == twice.window.values);  // deterministic

    for (std::size_t i = 0; i < window.n_b; ++i) {
        for (std::size_t j = 0; j < window.n; ++j) {
            const bool in_span = i == 1 && j >= 29 && j < 32;
            if (!in_span) REQUIRE(once.window.value(i, j) == window.value(i, j));
        }
    }
}

TEST_CASE("injection coordinate validation", "[inject]") {
    const auto window = flat_window();
    REQUIRE_THROWS_AS(inject(window, {BadDataKind::spike, 3, 10, 1, 0.1, {}, 0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(inject(window, {BadDataKind::spike, 1, 99, 5, 0.1, {}, 0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(inject(window, {BadDataKind::spike, 1, 0, 1, 0.1, {}, 0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(inject(window, {BadDataKind::spike, 1, 10, 1, NAN, {}, 0}),
                      std::invalid_argument);
}
