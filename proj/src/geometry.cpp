#include "fbgather/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace fbgather {

namespace {

using Mask = std::uint64_t;

MemberSet members_of(Mask mask) {
    MemberSet out;
    for (int j = 0; mask != 0; ++j, mask >>= 1)
        if (mask & 1u) out.push_back(j);
    return out;
}

}  // namespace

MembershipMap membership(const Scenario& scenario, std::span<const Point> positions) {
    MembershipMap out(positions.size());
    for (std::size_t t = 0; t < positions.size(); ++t)
        for (const auto& sensor : scenario.sensors)
            if (sensor.observes(positions[t])) out[t].push_back(sensor.id);
    return out;
}

std::vector<MemberSet> collaborative_sets(const Scenario& scenario) {
    const Environment& env = scenario.environment;
    const auto& sensors = scenario.sensors;
    const double res = env.grid_resolution;

    // Only the part of S inside at least two disks matters; scan the bounding box of the disks.
    double x0 = env.width, y0 = env.height, x1 = 0.0, y1 = 0.0;
    for (const auto& s : sensors) {
        x0 = std::min(x0, s.center.x - s.radius);
        y0 = std::min(y0, s.center.y - s.radius);
        x1 = std::max(x1, s.center.x + s.radius);
        y1 = std::max(y1, s.center.y + s.radius);
    }
    x0 = std::max(x0, 0.0);
    y0 = std::max(y0, 0.0);
    x1 = std::min(x1, env.width);
    y1 = std::min(y1, env.height);

    std::unordered_set<Mask> masks;
    const auto nx = static_cast<long>(std::ceil(env.width / res));
    const auto ny = static_cast<long>(std::ceil(env.height / res));
    const long ix0 = std::max(0L, static_cast<long>(std::floor(x0 / res)));
    const long iy0 = std::max(0L, static_cast<long>(std::floor(y0 / res)));
    const long ix1 = std::min(nx - 1, static_cast<long>(std::ceil(x1 / res)));
    const long iy1 = std::min(ny - 1, static_cast<long>(std::ceil(y1 / res)));

    for (long ix = ix0; ix <= ix1; ++ix) {
        const double x = std::min((static_cast<double>(ix) + 0.5) * res, env.width);
        for (long iy = iy0; iy <= iy1; ++iy) {
            const double y = std::min((static_cast<double>(iy) + 0.5) * res, env.height);
            Mask mask = 0;
            for (std::size_t j = 0; j < sensors.size(); ++j)
                if (sensors[j].observes({x, y})) mask |= Mask{1} << j;
            if (std::popcount(mask) >= 2) masks.insert(mask);
        }
    }

    // A subset shares a point iff it is contained in the observation mask of some grid point.
    std::set<Mask> subsets;
    for (Mask mask : masks) {
        for (Mask sub = mask; sub != 0; sub = (sub - 1) & mask)
            if (std::popcount(sub) >= 2) subsets.insert(sub);
    }
    std::vector<MemberSet> out;
    out.reserve(subsets.size());
    for (Mask m : subsets) out.push_back(members_of(m));
    std::sort(out.begin(), out.end());
    return out;
}

int CollaborativeStructure::find(const MemberSet& members) const {
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (sets[i].members == members) return static_cast<int>(i);
    return -1;
}

int CollaborativeStructure::observed_targets() const {
    int total = 0;
    for (int n : unique_counts) total += n;
    for (const auto& s : sets) total += s.n_c;
    return total;
}

CollaborativeStructure component_counts(const MembershipMap& membership, std::span<const MemberSet> sets,
                                        std::size_t sensor_count) {
    CollaborativeStructure out;
    out.unique_counts.assign(sensor_count, 0);
    out.sets.reserve(sets.size());
    for (const auto& members : sets) out.sets.push_back({members, 0});

    for (std::size_t t = 0; t < membership.size(); ++t) {
        const MemberSet& m = membership[t];
        if (m.empty()) continue;
        if (m.size() == 1) {
            out.unique_counts.at(static_cast<std::size_t>(m.front())) += 1;
            continue;
        }
        const int idx = out.find(m);
        if (idx < 0)
            throw std::logic_error("target " + std::to_string(t) +
                                   " is observed by a sensor group with no collaborative set");
        out.sets[static_cast<std::size_t>(idx)].n_c += 1;
    }
    return out;
}

void write_structure_csv(std::ostream& out, const CollaborativeStructure& structure) {
    out << "# fbgather structure v1\n";
    out << "kind,members,count\n";
    for (std::size_t j = 0; j < structure.unique_counts.size(); ++j)
        out << "unique," << j << "," << structure.unique_counts[j] << "\n";
    for (const auto& set : structure.sets) {
        out << "collaborative,";
        for (std::size_t i = 0; i < set.members.size(); ++i) out << (i ? " " : "") << set.members[i];
        out << "," << set.n_c << "\n";
    }
}

}  // namespace fbgather
