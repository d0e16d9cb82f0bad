#pragma once

#include <vector>

#include "fbgather/scenario.hpp"

namespace fbgather {

inline constexpr int kCentralUnit = -1;

struct Component {
    int target_id = 0;
    Point value;

    friend bool operator==(const Component&, const Component&) = default;
};

/// An uplink (sensor -> central) or feedback (central -> sensors) transmission.
/// Duration is components.size() times the per-component delay of its direction.
struct Packet {
    int sensor_id = kCentralUnit;
    int step = 0;  // sampling step whose measurements the packet carries
    std::vector<Component> components;
    double start_time = 0.0;
    double duration = 0.0;

    double end_time() const { return start_time + duration; }
};

}  // namespace fbgather
