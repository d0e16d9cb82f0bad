#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fbgather/geometry.hpp"
#include "helpers.hpp"

using namespace fbgather;
using testing_support::make_scenario;

namespace {

/// Independent oracle: for every subset of size >= 2, scan S at `res` for a point inside all disks.
std::vector<MemberSet> brute_force_sets(const Scenario& s, double res) {
    const int m = static_cast<int>(s.sensors.size());
    std::vector<MemberSet> out;
    for (int mask = 1; mask < (1 << m); ++mask) {
        MemberSet members;
        for (int j = 0; j < m; ++j)
            if (mask & (1 << j)) members.push_back(j);
        if (members.size() < 2) continue;
        // restrict the scan to the first member's disk
        const auto& first = s.sensors[static_cast<std::size_t>(members[0])];
        const long lo_x = std::max(0L, std::lround((first.center.x - first.radius) / res) - 1);
        const long hi_x = std::lround(std::min(s.environment.width, first.center.x + first.radius) / res) + 1;
        const long lo_y = std::max(0L, std::lround((first.center.y - first.radius) / res) - 1);
        const long hi_y = std::lround(std::min(s.environment.height, first.center.y + first.radius) / res) + 1;
        bool found = false;
        for (long ix = lo_x; ix <= hi_x && !found; ++ix)
            for (long iy = lo_y; iy <= hi_y && !found; ++iy) {
                const Point p{ix * res, iy * res};
                if (!s.environment.contains(p)) continue;
                bool all = true;
                for (int j : members) {
                    const auto& sj = s.sensors[static_cast<std::size_t>(j)];
                    if (std::hypot(p.x - sj.center.x, p.y - sj.center.y) > sj.radius) {
                        all = false;
                        break;
                    }
                }
                found = all;
            }
        if (found) out.push_back(members);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Scenario random_layout(std::mt19937_64& rng, int sensors, int targets) {
    std::uniform_real_distribution<double> pos(0.5, 9.5), rad(1.0, 4.0), tgt(0.01, 10.0);
    std::vector<SensorSpec> ss;
    for (int j = 0; j < sensors; ++j) ss.push_back({j, {pos(rng), pos(rng)}, rad(rng)});
    std::vector<Point> ts;
    for (int t = 0; t < targets; ++t) ts.push_back({tgt(rng), tgt(rng)});
    return make_scenario(ss, ts);
}

}  // namespace

TEST_CASE("membership examples") {
    const Scenario near = make_scenario({{0, {4, 5}, 1}, {1, {5, 5}, 1}}, {{4, 5}, {4.5, 5}});
    const std::vector<Point> pos{{4, 5}, {4.5, 5}};
    const auto m = membership(near, pos);
    CHECK(m[0] == MemberSet{0, 1});  // at sensor 0's center (also within 1 of sensor 1)
    CHECK(m[1] == MemberSet{0, 1});  // midpoint

    const Scenario far = make_scenario({{0, {2, 5}, 1}, {1, {5, 5}, 1}}, {{2, 5}});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const Point p{u(rng), u(rng)};
        CHECK(membership(far, std::span<const Point>(&p, 1))[0].size() < 2);
    }
    const Point at_center{2, 5};
    CHECK(membership(far, std::span<const Point>(&at_center, 1))[0] == MemberSet{0});
}

TEST_CASE("collaborative_sets examples") {
    CHECK(collaborative_sets(make_scenario({{0, {4, 5}, 1}, {1, {5, 5}, 1}}, {{5, 5}})) ==
          std::vector<MemberSet>{{0, 1}});
    CHECK(collaborative_sets(make_scenario({{0, {2, 5}, 1}, {1, {5, 5}, 1}}, {{5, 5}})).empty());
    const Scenario triple = make_scenario({{0, {3, 5}, 2}, {1, {5, 5}, 2}, {2, {4, 6.7}, 2}}, {{5, 5}});
    // lexicographic order puts {0,1,2} right after {0,1}
    CHECK(collaborative_sets(triple) == std::vector<MemberSet>{{0, 1}, {0, 1, 2}, {0, 2}, {1, 2}});
}

TEST_CASE("seven-target constructed layout") {
    const std::vector<Point> pos{{1.5, 5}, {2, 4}, {6.5, 4.5}, {4, 8.2}, {4, 3.8}, {5.5, 6}, {4, 5.5}};
    const Scenario s = make_scenario({{0, {3, 5}, 2}, {1, {5, 5}, 2}, {2, {4, 6.7}, 2}}, pos);
    const auto m = membership(s, pos);
    REQUIRE(m == MembershipMap{{0}, {0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}});
    const auto sets = collaborative_sets(s);
    const auto c = component_counts(m, sets, 3);
    CHECK(c.unique_counts == std::vector<int>{2, 1, 1});
    CHECK(c.sets[static_cast<std::size_t>(c.find({0, 1}))].n_c == 1);
    CHECK(c.sets[static_cast<std::size_t>(c.find({1, 2}))].n_c == 1);
    CHECK(c.sets[static_cast<std::size_t>(c.find({0, 1, 2}))].n_c == 1);
    CHECK(c.sets[static_cast<std::size_t>(c.find({0, 2}))].n_c == 0);
    CHECK(c.observed_targets() == 7);
}

TEST_CASE("component_counts edge cases") {
    const auto none = component_counts({}, std::vector<MemberSet>{{0, 1}}, 2);
    CHECK(none.unique_counts == std::vector<int>{0, 0});
    CHECK(none.sets[0].n_c == 0);

    const MembershipMap five(5, MemberSet{0});
    const auto single = component_counts(five, {}, 1);
    CHECK(single.unique_counts == std::vector<int>{5});
    CHECK(single.sets.empty());

    CHECK_THROWS_AS(component_counts({{0, 1}}, {}, 2), std::logic_error);
    CHECK(component_counts({{}, {}}, {}, 2).observed_targets() == 0);
}

TEST_CASE("oracle equivalence on random layouts") {
    std::mt19937_64 rng(20240611);
    for (int layout = 0; layout < 12; ++layout) {
        const Scenario s = random_layout(rng, 2 + layout % 3, 1);
        CAPTURE(layout);
        CHECK(collaborative_sets(s) == brute_force_sets(s, 0.01));
    }
}

TEST_CASE("conservation on random configurations") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i) {
        const Scenario s = random_layout(rng, 1 + i % 4, 1 + i % 9);
        std::vector<Point> pos;
        for (const auto& t : s.targets) pos.push_back(t.initial_position);
        const auto m = membership(s, pos);
        const auto c = component_counts(m, collaborative_sets(s), s.sensors.size());
        int observed = 0;
        for (const auto& mm : m) observed += !mm.empty();
        CHECK(c.observed_targets() == observed);
    }
}

TEST_CASE("adding a sensor never removes collaborative sets") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 30; ++i) {
        Scenario s = random_layout(rng, 3, 1);
        const auto before = collaborative_sets(s);
        std::uniform_real_distribution<double> pos(0.5, 9.5);
        s.sensors.push_back({3, {pos(rng), pos(rng)}, 2.5});
        const auto after = collaborative_sets(s);
        CHECK(after.size() >= before.size());
        for (const auto& set : before) CHECK(std::find(after.begin(), after.end(), set) != after.end());
    }
}

TEST_CASE("structure csv") {
    CollaborativeStructure c;
    c.unique_counts = {2, 0};
    c.sets = {{{0, 1}, 3}};
    std::ostringstream out;
    write_structure_csv(out, c);
    CHECK(out.str() == "# fbgather structure v1\nkind,members,count\nunique,0,2\nunique,1,0\ncollaborative,0 1,3\n");
}
