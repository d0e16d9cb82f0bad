#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fbgather/experiments.hpp"
#include "fbgather/geometry.hpp"
#include "fbgather/plot.hpp"
#include "fbgather/protocol.hpp"
#include "fbgather/stats.hpp"

using namespace fbgather;

namespace {

SweepSpec small_sweep() {
    SweepSpec spec;
    spec.base = load_scenario(std::string(FBGATHER_SCENARIO_DIR) + "/layout_four.json");
    spec.backoff_intervals = {20, 100};
    spec.uplink_powers = {1, 3};
    spec.trials = 6;
    return spec;
}

}  // namespace

TEST_CASE("assumption1 layout: tau and structure") {
    const Scenario s = assumption1_scenario(3, 3, 0, 9.0);
    CHECK(s.protocol.uplink_delay == doctest::Approx(2.0));
    CHECK(s.protocol.downlink_delay == doctest::Approx(1.0));
    const double tau = 3 * s.protocol.uplink_delay + 3 * s.protocol.downlink_delay;
    CHECK(tau == doctest::Approx(9.0));
    std::vector<Point> pos;
    for (const auto& t : s.targets) pos.push_back(t.initial_position);
    const auto c = component_counts(membership(s, pos), collaborative_sets(s), 3);
    CHECK(c.sets[static_cast<std::size_t>(c.find({0, 1, 2}))].n_c == 3);
    CHECK(c.unique_counts == std::vector<int>{0, 0, 0});
}

TEST_CASE("assumption1 layout: unique targets give equal packet sizes") {
    const Scenario s = assumption1_scenario(2, 1, 1, 9.0);
    std::vector<Point> pos;
    for (const auto& t : s.targets) pos.push_back(t.initial_position);
    const auto c = component_counts(membership(s, pos), collaborative_sets(s), 2);
    CHECK(c.unique_counts == std::vector<int>{1, 1});
    CHECK(c.sets[static_cast<std::size_t>(c.find({0, 1}))].n_c == 1);
    // both sensors schedule 2 components at step 0
    Scenario fb = s;
    fb.architecture = Architecture::Feedback;
    const TrialResult r = run_trial(fb);
    int seen = 0;
    for (const auto& rec : r.log.records)
        if (rec.kind == EventKind::BackoffSet && rec.step == 0) {
            CHECK(rec.size == 2);
            ++seen;
        }
    CHECK(seen == 2);
    CHECK(2 * s.protocol.uplink_delay + s.protocol.downlink_delay == doctest::Approx(9.0));
}

TEST_CASE("assumption1 layout rejects bad requests") {
    CHECK_THROWS_AS(assumption1_scenario(1, 3, 0, 9.0), std::invalid_argument);
    CHECK_THROWS_AS(assumption1_scenario(3, 0, 0, 9.0), std::invalid_argument);
}

TEST_CASE("region cell timing") {
    const Scenario base = assumption1_scenario(3, 3, 0, 9.0);
    const Scenario cell = region_cell_scenario(base, 9.0, 0.05);
    CHECK(cell.protocol.backoff_interval == doctest::Approx(180.0));
    CHECK(cell.protocol.sampling_period >= 180.0 + 18.0);
    CHECK(cell.protocol.horizon == 6 * cell.protocol.sampling_period);
    CHECK_THROWS_AS(region_cell_scenario(base, 9.0, 0.0), std::invalid_argument);
}

TEST_CASE("running stats merge equals single pass") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d(3.0, 2.0);
    std::vector<double> v(1000);
    for (auto& x : v) x = d(rng);
    RunningStats all;
    for (double x : v) all.add(x);
    for (std::size_t cut : {0ul, 1ul, 333ul, 999ul, 1000ul}) {
        RunningStats a, b;
        for (std::size_t i = 0; i < v.size(); ++i) (i < cut ? a : b).add(v[i]);
        a.merge(b);
        CHECK(a.count() == all.count());
        CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
        CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    CHECK_THROWS_AS(parallel_for(100, 4, [](std::size_t i) { if (i == 57) throw std::runtime_error("x"); }),
                    std::runtime_error);
}

TEST_CASE("sweep shape, ordering, and jobs independence") {
    const SweepSpec spec = small_sweep();
    const SweepResult one = run_sweep(spec, 1);
    const SweepResult many = run_sweep(spec, 8);
    REQUIRE(one.rows.size() == 2 * 2 * 2);
    CHECK(one.rows[0].architecture == Architecture::Feedback);
    CHECK(one.rows[1].architecture == Architecture::NoFeedback);
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        CHECK(one.rows[i].mean_power == many.rows[i].mean_power);
        CHECK(one.rows[i].mean_mse == many.rows[i].mean_mse);
        CHECK(one.rows[i].se_power == many.rows[i].se_power);
        CHECK(one.rows[i].trials == 6);
        CHECK(one.rows[i].se_power >= 0.0);
    }
    // NF cost normalized by dp_u does not depend on dp_u
    CHECK(one.find(20, 1, Architecture::NoFeedback).mean_power ==
          doctest::Approx(one.find(20, 3, Architecture::NoFeedback).mean_power));
    CHECK_THROWS_AS(one.find(7, 1, Architecture::Feedback), std::out_of_range);
}

TEST_CASE("one paired trial: FB and NF share samples and motion") {
    SweepSpec spec = small_sweep();
    spec.trials = 1;
    spec.backoff_intervals = {40};
    spec.uplink_powers = {1};
    const SweepResult r = run_sweep(spec);
    CHECK(r.rows.size() == 2);
    Scenario fb = spec.base, nf = spec.base;
    fb.architecture = Architecture::Feedback;
    nf.architecture = Architecture::NoFeedback;
    fb.seed = nf.seed = trial_seed(spec.base.seed, 0);
    TrialOptions opt;
    opt.record_trajectory = true;
    const auto a = run_trial(fb, opt), b = run_trial(nf, opt);
    std::vector<EventRecord> sa, sb;
    for (const auto& rec : a.log.records)
        if (rec.kind == EventKind::Sample || rec.kind == EventKind::Move) sa.push_back(rec);
    for (const auto& rec : b.log.records)
        if (rec.kind == EventKind::Sample || rec.kind == EventKind::Move) sb.push_back(rec);
    CHECK(sa == sb);
    CHECK(a.trajectory.size() == b.trajectory.size());
}

TEST_CASE("sweep spec validation") {
    SweepSpec spec = small_sweep();
    spec.backoff_intervals.clear();
    CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
    spec = small_sweep();
    spec.trials = 0;
    CHECK_THROWS_AS(check_sweep_spec(spec), std::invalid_argument);
    spec = small_sweep();
    spec.uplink_powers.clear();
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
}

TEST_CASE("sweep spec file with relative scenario path") {
    const SweepSpec spec = load_sweep_spec(std::string(FBGATHER_SCENARIO_DIR) + "/sweep_four.json");
    CHECK(spec.backoff_intervals.size() == 11);
    CHECK(spec.backoff_intervals.front() == 1.0);
    CHECK(spec.backoff_intervals.back() == 200.0);
    CHECK(spec.uplink_powers == std::vector<double>{1, 2, 3, 4});
    CHECK(spec.trials == 500);
    CHECK(spec.paired_seeds);
    CHECK(spec.base.sensors.size() == 4);
    const SweepSpec small =
        load_sweep_spec(std::string(FBGATHER_SCENARIO_DIR) + "/sweep_four.json", {"trials=3"});
    CHECK(small.trials == 3);
}

TEST_CASE("region experiment: small grid, determinism, expected cell") {
    RegionSpec spec;
    spec.set_size = 3;
    spec.xs = {0.2};
    spec.ys = {2.0};
    spec.trials = 40;
    const auto a = region_experiment(spec, 1);
    const auto b = region_experiment(spec, 4);
    REQUIRE(a.size() == 1);
    CHECK(a[0].g == doctest::Approx(1.224));
    CHECK(a[0].theoretical == Verdict::Advantageous);
    REQUIRE(a[0].empirical);
    CHECK(a[0].empirical->mean > 0.0);
    CHECK(a[0].empirical->mean == b[0].empirical->mean);
    CHECK(a[0].backoff_interval == doctest::Approx(45.0));

    spec.xs = {0.0};
    CHECK_THROWS_AS(region_experiment(spec), std::invalid_argument);
    spec.xs = {0.5};
    spec.trials = 0;
    CHECK_THROWS_AS(region_experiment(spec), std::invalid_argument);
}

TEST_CASE("|J| 2 at y 1 is never theoretically advantageous") {
    RegionSpec spec;
    spec.set_size = 2;
    spec.xs = {0.05, 0.5, 0.95};
    spec.ys = {1.0};
    spec.trials = 10;
    for (const auto& p : region_experiment(spec)) CHECK(p.theoretical == Verdict::NotAdvantageous);
}

TEST_CASE("score_region skips boundary cells") {
    std::vector<AdvantagePoint> pts(4);
    pts[0].theoretical = Verdict::Advantageous;
    pts[0].empirical = EmpiricalResult{1, 0.1, 10, Verdict::Advantageous};
    pts[1].theoretical = Verdict::Advantageous;
    pts[1].empirical = EmpiricalResult{-1, 0.1, 10, Verdict::NotAdvantageous};
    pts[2].theoretical = Verdict::NotAdvantageous;
    pts[2].empirical = EmpiricalResult{0.01, 0.1, 10, Verdict::Boundary};
    const auto s = score_region(pts);
    CHECK(s.agree == 1);
    CHECK(s.disagree == 1);
    CHECK(s.boundary == 1);
    CHECK(s.fraction() == 0.5);
}

TEST_CASE("FB integral beats NF in most paired trials when the MSE condition holds") {
    // eps / sigma = 0.2 / 0.01 = 20 above the threshold for this layout's dt_u; every target moves
    // each period, so informed sensors always carry a unique component
    Scenario s = assumption1_scenario(3, 3, 1, 9.0);
    s.protocol.backoff_interval = 40.0;
    const auto m = mse_advantage({s.protocol.trigger_threshold, s.protocol.noise_std, s.protocol.sampling_period,
                                  s.protocol.uplink_delay, 1.0});
    REQUIRE(m.ratio == doctest::Approx(20.0));
    REQUIRE(m.satisfied);
    int better = 0;
    const int trials = 500;
    for (int i = 0; i < trials; ++i) {
        Scenario fb = s, nf = s;
        fb.architecture = Architecture::Feedback;
        nf.architecture = Architecture::NoFeedback;
        fb.seed = nf.seed = trial_seed(7, static_cast<std::uint64_t>(i));
        TrialOptions opt;
        opt.record_events = false;
        better += run_trial(fb, opt).trace.integral <= run_trial(nf, opt).trace.integral;
    }
    CHECK(better >= 0.95 * trials);
}

TEST_CASE("svg emitters produce closed documents") {
    SweepSpec spec = small_sweep();
    spec.trials = 2;
    const SweepResult r = run_sweep(spec);
    std::ostringstream a;
    write_sweep_svg(a, r, 3);
    CHECK(a.str().rfind("<svg", 0) == 0);
    CHECK(a.str().find("</svg>") != std::string::npos);
    CHECK(a.str().find("polyline") != std::string::npos);

    const std::vector<double> xs{0.1, 0.5}, ys{1, 2};
    std::ostringstream b;
    write_region_svg(b, raster_region(3, xs, ys));
    CHECK(b.str().find("</svg>") != std::string::npos);
    CHECK(b.str().find("<rect") != std::string::npos);
}
