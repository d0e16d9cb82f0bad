#include <doctest.h>

#include <cmath>

#include "fbgather/analytics.hpp"
#include "fbgather/experiments.hpp"
#include "helpers.hpp"

using namespace fbgather;

TEST_CASE("power_diff examples") {
    const SetTerm one{2, 2, 3};
    CHECK(power_diff(std::span(&one, 1), 2.0, 1.0) == 6.0);

    const std::vector<SetTerm> none_informed{{2, 0, 3}, {1, 0, 2}};
    CHECK(power_diff(none_informed, 2.0, 1.0) == -(2 * 3 + 1 * 2) * 1.0);

    const std::vector<SetTerm> empty{{0, 1, 3}, {0, 0, 2}};
    CHECK(power_diff(empty, 5.0, 3.0) == 0.0);

    const SetTerm bad{1, 3, 3};
    CHECK_THROWS_AS(power_diff(std::span(&bad, 1), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("expected_informed examples") {
    CHECK(expected_informed(0.0, 4) == 3.0);
    for (int j = 2; j <= 6; ++j) CHECK(expected_informed(1.0, j) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(expected_informed(0.5, 2) == doctest::Approx(0.25));
    CHECK(expected_informed(0.3, 3) == doctest::Approx(1.127));
    CHECK(expected_informed(1.7, 3) == 0.0);
    CHECK_THROWS_AS(expected_informed(0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(expected_informed(-0.1, 3), std::invalid_argument);
}

TEST_CASE("expected_informed is continuous and decreasing on [0,1]") {
    for (int j = 2; j <= 6; ++j) {
        double prev = expected_informed(0.0, j);
        CHECK(prev == j - 1);
        for (int i = 1; i <= 1000; ++i) {
            const double v = expected_informed(i / 1000.0, j);
            CHECK(v <= prev + 1e-12);
            CHECK(prev - v < 0.01 * j);  // no jumps at this spacing
            prev = v;
        }
        CHECK(std::abs(prev) < 1e-12);
    }
}

TEST_CASE("oracle endpoints and a mid value") {
    Rng rng(5);
    const auto zero = oracle_informed(0.0, 4, 1000, rng);
    CHECK(zero.mean == 3.0);
    CHECK(zero.standard_error == 0.0);
    const auto one = oracle_informed(1.0, 4, 1000, rng);
    CHECK(one.mean == 0.0);
    const auto beyond = oracle_informed(1.5, 3, 1000, rng);
    CHECK(beyond.mean == 0.0);

    const auto mid = oracle_informed(0.3, 3, 200000, rng);
    CHECK(std::abs(mid.mean - expected_informed(0.3, 3)) < 3 * mid.standard_error);
    CHECK_THROWS_AS(oracle_informed(0.3, 3, 0, rng), std::invalid_argument);
}

TEST_CASE("feasibility") {
    CHECK(feasibility(3) == 0.5);
    CHECK(feasibility(2) == 1.0);
    CHECK(feasibility(1000) < 0.002);
    CHECK_THROWS_AS(feasibility(1), std::invalid_argument);
}

TEST_CASE("advantage_poly examples") {
    for (int j = 2; j <= 5; ++j)
        for (double y : {0.1, 0.5, 1.0, 2.0, 7.0}) {
            CHECK(advantage_poly({0.0, y, double(j)}) == doctest::Approx((j - 1) * y - 1));
            CHECK(advantage_poly({1.0, y, double(j)}) == doctest::Approx(-j));
            CHECK_FALSE(power_advantageous({1.0, y, double(j)}));
        }
    CHECK(advantage_poly({0.2, 2.0, 3.0}) == doctest::Approx(1.224));
    CHECK(power_advantageous({0.2, 2.0, 3.0}));
    CHECK(advantage_poly({1.4, 2.0, 3.0}) == advantage_poly({1.0, 2.0, 3.0}));
}

TEST_CASE("g(0) sign tracks feasibility") {
    for (int j = 2; j <= 5; ++j)
        for (int i = 0; i < 100; ++i) {
            const double y = 0.013 + i * 0.031;
            CHECK((advantage_poly({0.0, y, double(j)}) > 0) == (y > feasibility(j)));
        }
}

TEST_CASE("sign of g matches power_diff with expected informed counts") {
    for (int j = 2; j <= 5; ++j)
        for (int xi = 0; xi <= 20; ++xi)
            for (int yi = 1; yi <= 20; ++yi) {
                const double x = xi / 20.0, y = yi * 0.5;
                // power_diff needs |I| < |J|; expected_informed <= |J| - 1 always
                const SetTerm term{3.0, expected_informed(x, j), double(j)};
                const double diff = power_diff(std::span(&term, 1), y, 1.0);
                const double g = advantage_poly({x, y, double(j)});
                if (std::abs(g) < 1e-9) continue;
                CAPTURE(j);
                CAPTURE(x);
                CAPTURE(y);
                CHECK((g > 0) == (diff > 0));
            }
}

TEST_CASE("mse_advantage examples") {
    const auto s1 = mse_advantage({2.0, 0.1, 150.0, 2.0, 1.0});
    CHECK(s1.threshold == doctest::Approx(std::sqrt(149.0)));
    CHECK(s1.threshold == doctest::Approx(12.2066).epsilon(1e-5));
    CHECK(s1.ratio == doctest::Approx(20.0));
    CHECK(s1.satisfied);

    CHECK(mse_advantage({2.0, 0.1, 1.0, 2.0, 1.0}).threshold == 0.0);
    CHECK(mse_advantage({2.0, 1e-9, 1e6, 0.1, 1.0}).satisfied);
    CHECK_THROWS_AS(mse_advantage({0.0, 0.1, 150.0, 2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mse_advantage({2.0, 0.1, 150.0, 2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("mse_bounds examples") {
    const MseAdvantageParams p{2.0, 0.1, 150.0, 2.0, 1.0};
    const std::vector<SetTerm> none{{3, 0, 3}, {1, 0, 2}};
    const auto zero = mse_bounds(none, p);
    CHECK(zero.advantage_lower == 0.0);
    CHECK(zero.disadvantage_upper == 0.0);

    const SetTerm one{1, 1, 2};
    const auto b = mse_bounds(std::span(&one, 1), p);
    CHECK(b.advantage_lower == doctest::Approx(8.02));
    CHECK(b.disadvantage_upper == doctest::Approx(1.5));
    CHECK(b.advantage_lower > b.disadvantage_upper);

    const SetTerm full{1, 2, 2};
    CHECK_THROWS_AS(mse_bounds(std::span(&full, 1), p), std::invalid_argument);
}

TEST_CASE("at the threshold the relaxed bounds meet") {
    // Replacing |I| / (|J| (|J| - |I|)) by |I| in the disadvantage bound gives 2 T_s |I| n_c sigma^2;
    // equality of eps/sigma with the threshold makes it equal the advantage bound.
    for (double ts : {50.0, 150.0, 400.0})
        for (double numin : {1.0, 2.0, 3.0}) {
            const double dtu = 2.0, sigma = 0.1;
            const auto m = mse_advantage({1.0, sigma, ts, dtu, numin});
            const double eps = m.threshold * sigma;
            const double informed = 1.0, n_c = 2.0;
            const double adv = (eps * eps + sigma * sigma) * numin * dtu * informed * n_c;
            const double relaxed = 2.0 * ts * informed * n_c * sigma * sigma;
            CHECK(adv == doctest::Approx(relaxed).epsilon(1e-12));
            const SetTerm term{n_c, informed, 2.0};
            CHECK(mse_bounds(std::span(&term, 1), {eps, sigma, ts, dtu, numin}).advantage_lower ==
                  doctest::Approx(adv));
        }
}

TEST_CASE("raster_region examples") {
    const std::vector<double> xs{0.0, 0.1, 0.5, 0.9, 1.0};
    const std::vector<double> y1{1.0};
    for (const auto& p : raster_region(2, xs, y1)) CHECK(p.theoretical == Verdict::NotAdvantageous);

    const std::vector<double> x01{0.01}, y10{10.0};
    const auto cell = raster_region(3, x01, y10);
    REQUIRE(cell.size() == 1);
    CHECK(cell[0].theoretical == Verdict::Advantageous);
    CHECK(cell[0].g == doctest::Approx(0.000011 - 0.33 + 19).epsilon(1e-4));

    const std::vector<double> x1{1.0}, ys{0.5, 1, 2, 5, 10};
    for (const auto& p : raster_region(4, x1, ys)) CHECK(p.theoretical == Verdict::NotAdvantageous);

    const std::vector<double> gx{0.1, 0.2}, gy{1, 2, 3};
    const auto grid = raster_region(3, gx, gy);
    REQUIRE(grid.size() == 6);
    CHECK(grid[1].params.x == 0.1);  // x-major
    CHECK(grid[1].params.y == 2.0);
    CHECK(grid[3].params.x == 0.2);
    CHECK(to_string(Verdict::Boundary) == std::string("boundary"));
}

TEST_CASE("approx_params on a symmetric layout equals the exact values") {
    Scenario s = assumption1_scenario(3, 3, 0, 9.0);
    const auto approx = approx_params(s);
    REQUIRE(approx.sensors.size() == 3);
    for (const auto& a : approx.sensors) {
        CHECK(a.included);
        CHECK(a.set_size == doctest::Approx(3.0));
        CHECK(a.delay == doctest::Approx(9.0));
        CHECK(a.x == doctest::Approx(9.0 / s.protocol.backoff_interval));
    }
    CHECK(approx.mean_delay() == doctest::Approx(9.0));
    CHECK(approx.advantageous(s.protocol.backoff_interval, 2.0) ==
          power_advantageous({9.0 / s.protocol.backoff_interval, 2.0, 3.0}));
}

TEST_CASE("approx_params excludes sensors with no collaborative area") {
    Scenario s = testing_support::make_scenario({{0, {2, 5}, 1.5}, {1, {4, 5}, 1.5}, {2, {8.5, 8.5}, 1}},
                                                {{3, 5}, {8.5, 8.5}});
    const auto approx = approx_params(s);
    CHECK(approx.sensors[0].included);
    CHECK(approx.sensors[1].included);
    CHECK_FALSE(approx.sensors[2].included);
    CHECK(approx.sensors[0].set_size == doctest::Approx(2.0));
}
