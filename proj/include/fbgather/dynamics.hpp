#pragma once

#include <span>
#include <vector>

#include "fbgather/rng.hpp"
#include "fbgather/scenario.hpp"

namespace fbgather {

/// Ground truth at one instant.
struct WorldState {
    double time = 0.0;
    std::vector<Point> positions;  // indexed by target id
};

struct Measurement {
    int target_id = 0;
    int sensor_id = 0;
    Point value;
    double timestamp = 0.0;
};

/// Folds `v` back into [lo, hi] by mirror reflection, however far outside it is.
double reflect_into(double v, double lo, double hi);

/// One lazy-random-walk tick: each target jumps `step_size` in a uniform direction with
/// probability `move_probability`, reflecting off S (or its confinement box).
/// Always consumes two uniform draws per target so trajectories are draw-aligned.
WorldState step_targets(const WorldState& state, const DynamicsParams& params, const Environment& env,
                        std::span<const TargetSpec> targets, Rng& rng);

/// Noisy readings of the targets inside the sensor's disk. Draws noise for every target,
/// observed or not, so the noise stream stays aligned across runs that differ only in who listens.
std::vector<Measurement> measure(const WorldState& state, const SensorSpec& sensor, double noise_std, Rng& rng);

/// Initial world for a trial; redraws positions when the scenario asks for random placement.
WorldState initial_world(const Scenario& scenario, std::uint64_t trial_seed);

}  // namespace fbgather
