#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fbgather/scenario.hpp"

namespace fbgather {

/// Sorted sensor ids.
using MemberSet = std::vector<int>;

/// membership[t] = sorted ids of the sensors whose disk contains target t.
using MembershipMap = std::vector<MemberSet>;

struct CollaborativeSet {
    MemberSet members;  // |members| >= 2
    int n_c = 0;        // targets whose membership equals `members` exactly

    friend bool operator==(const CollaborativeSet&, const CollaborativeSet&) = default;
};

struct CollaborativeStructure {
    std::vector<CollaborativeSet> sets;
    std::vector<int> unique_counts;  // n_u^j, indexed by sensor id

    /// Index into `sets` of the set equal to `members`, or -1.
    int find(const MemberSet& members) const;
    int observed_targets() const;

    friend bool operator==(const CollaborativeStructure&, const CollaborativeStructure&) = default;
};

MembershipMap membership(const Scenario& scenario, std::span<const Point> positions);

/// Every sensor subset of size >= 2 whose disks share a point of S, sorted lexicographically.
/// Nonemptiness is tested on a grid of spacing `environment.grid_resolution`.
std::vector<MemberSet> collaborative_sets(const Scenario& scenario);

/// Attributes each observed target either to its lone observer (n_u) or to the set equal to
/// its membership (n_c). Throws std::logic_error when a multi-sensor membership matches no set.
CollaborativeStructure component_counts(const MembershipMap& membership, std::span<const MemberSet> sets,
                                        std::size_t sensor_count);

/// Writes `kind,members,count` rows; debugging aid for the CLI.
void write_structure_csv(std::ostream& out, const CollaborativeStructure& structure);

}  // namespace fbgather
