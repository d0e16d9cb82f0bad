#pragma once

#include <vector>

#include "fbgather/scenario.hpp"

namespace testing_support {

/// Small legal scenario: 10x10 field, sensors and targets as given, quiet defaults.
inline fbgather::Scenario make_scenario(const std::vector<fbgather::SensorSpec>& sensors,
                                        const std::vector<fbgather::Point>& targets) {
    fbgather::Scenario s;
    s.environment = {10.0, 10.0, 0.05};
    s.sensors = sensors;
    for (std::size_t i = 0; i < targets.size(); ++i) s.targets.push_back({static_cast<int>(i), targets[i], {}});
    s.protocol = {10.0, 4.0, 1.0, 0.5, 0.2, 0.05, 50.0, {}};
    s.dynamics = {0.5, 10.0, 0.5};
    s.costs = {1.0, 1.0};
    s.architecture = fbgather::Architecture::NoFeedback;
    s.seed = 1;
    return s;
}

}  // namespace testing_support
