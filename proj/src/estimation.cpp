#include "fbgather/estimation.hpp"

#include <ostream>

#include "csv.hpp"

namespace fbgather {

void EstimatorState::fuse(const Packet& packet, double now) {
    for (const Component& c : packet.components) {
        TargetEstimate& e = targets_.at(static_cast<std::size_t>(c.target_id));
        if (e.has_value() && packet.step < e.epoch) continue;
        if (e.has_value() && packet.step == e.epoch) {
            e.sum.x += c.value.x;
            e.sum.y += c.value.y;
            e.fusion_count += 1;
        } else {
            e.sum = c.value;
            e.fusion_count = 1;
            e.epoch = packet.step;
        }
        e.value = {e.sum.x / e.fusion_count, e.sum.y / e.fusion_count};
        e.last_update_time = now;
    }
}

double EstimatorState::mean_squared_error(const WorldState& world, Point fallback_origin,
                                          std::optional<double> unseen_penalty) const {
    if (targets_.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t < targets_.size(); ++t) {
        const Point truth = world.positions.at(t);
        if (targets_[t].has_value())
            total += squared_distance(targets_[t].value, truth);
        else
            total += unseen_penalty ? *unseen_penalty : squared_distance(fallback_origin, truth);
    }
    return total / static_cast<double>(targets_.size());
}

void accumulate_mse(EstimatorTrace& trace, const EstimatorState& state, const WorldState& world, double dt,
                    Point fallback_origin, std::optional<double> unseen_penalty) {
    const double instant = state.mean_squared_error(world, fallback_origin, unseen_penalty);
    if (dt > 0.0) {
        trace.integral += dt * instant;
        trace.time += dt;
    }
    if (trace.record_points) trace.points.push_back({trace.time, instant, trace.integral});
}

void write_trace_csv(std::ostream& out, const EstimatorTrace& trace) {
    out << "# fbgather mse v1\n";
    out << "time,mse_instant,mse_integral\n";
    for (const auto& p : trace.points)
        out << csv::num(p.time) << ',' << csv::num(p.mse_instant) << ',' << csv::num(p.mse_integral) << '\n';
}

}  // namespace fbgather
