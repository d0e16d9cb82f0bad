#include "fbgather/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace fbgather {

double reflect_into(double v, double lo, double hi) {
    const double span = hi - lo;
    if (span <= 0.0) return lo;
    const double period = 2.0 * span;
    double u = std::fmod(v - lo, period);
    if (u < 0.0) u += period;
    if (u > span) u = period - u;
    return lo + u;
}

namespace {

Box bounds_of(const Environment& env, const TargetSpec* target) {
    if (target != nullptr && target->box) return *target->box;
    return {0.0, 0.0, env.width, env.height};
}

}  // namespace

WorldState step_targets(const WorldState& state, const DynamicsParams& params, const Environment& env,
                        std::span<const TargetSpec> targets, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    WorldState next = state;
    for (std::size_t t = 0; t < next.positions.size(); ++t) {
        const double coin = unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        if (!(coin < params.move_probability)) continue;
        const Box b = bounds_of(env, t < targets.size() ? &targets[t] : nullptr);
        Point& p = next.positions[t];
        p.x = reflect_into(p.x + params.step_size * std::cos(angle), b.xmin, b.xmax);
        p.y = reflect_into(p.y + params.step_size * std::sin(angle), b.ymin, b.ymax);
        // S is half-open at 0; a reflection landing exactly on the wall stays observable
        if (p.x <= 0.0) p.x = std::nextafter(0.0, 1.0);
        if (p.y <= 0.0) p.y = std::nextafter(0.0, 1.0);
    }
    return next;
}

std::vector<Measurement> measure(const WorldState& state, const SensorSpec& sensor, double noise_std, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Measurement> out;
    for (std::size_t t = 0; t < state.positions.size(); ++t) {
        const double nx = normal(rng);
        const double ny = normal(rng);
        const Point truth = state.positions[t];
        if (!sensor.observes(truth)) continue;
        out.push_back({static_cast<int>(t), sensor.id, {truth.x + noise_std * nx, truth.y + noise_std * ny},
                       state.time});
    }
    return out;
}

WorldState initial_world(const Scenario& scenario, std::uint64_t trial_seed) {
    WorldState w;
    w.positions.reserve(scenario.targets.size());
    if (!scenario.randomize_targets) {
        for (const auto& t : scenario.targets) w.positions.push_back(t.initial_position);
        return w;
    }
    Rng rng = make_stream(trial_seed, Stream::Placement);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& t : scenario.targets) {
        const Box b = bounds_of(scenario.environment, &t);
        Point p{b.xmin + (b.xmax - b.xmin) * unit(rng), b.ymin + (b.ymax - b.ymin) * unit(rng)};
        if (p.x <= 0.0) p.x = std::nextafter(0.0, 1.0);
        if (p.y <= 0.0) p.y = std::nextafter(0.0, 1.0);
        w.positions.push_back(p);
    }
    return w;
}

}  // namespace fbgather
