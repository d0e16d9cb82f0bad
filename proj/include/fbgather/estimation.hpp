#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fbgather/dynamics.hpp"
#include "fbgather/packet.hpp"

namespace fbgather {

struct TargetEstimate {
    Point value;
    Point sum;              // sum of the measurements fused in the current epoch
    int fusion_count = 0;   // measurements averaged in the current epoch; 0 = never estimated
    int epoch = -1;         // sampling step of the fused measurements
    double last_update_time = 0.0;

    bool has_value() const { return fusion_count > 0; }
};

/// Central unit: plain averaging of same-step measurements, holding the last value between steps.
class EstimatorState {
public:
    explicit EstimatorState(std::size_t target_count = 0) : targets_(target_count) {}

    /// Fuses a fully received uplink packet. Measurements from an older step than a target's
    /// current epoch are ignored.
    void fuse(const Packet& packet, double now);

    const TargetEstimate& at(int target) const { return targets_.at(static_cast<std::size_t>(target)); }
    std::size_t size() const { return targets_.size(); }

    /// Mean over targets of the squared estimate error; never-estimated targets cost
    /// `unseen_penalty` if given, else their squared distance from `fallback_origin`.
    double mean_squared_error(const WorldState& world, Point fallback_origin,
                              std::optional<double> unseen_penalty = std::nullopt) const;

private:
    std::vector<TargetEstimate> targets_;
};

struct TracePoint {
    double time = 0.0;
    double mse_instant = 0.0;
    double mse_integral = 0.0;
};

struct EstimatorTrace {
    std::vector<TracePoint> points;
    double integral = 0.0;
    double time = 0.0;
    bool record_points = true;

    /// integral / horizon
    double time_averaged(double horizon) const { return horizon > 0.0 ? integral / horizon : 0.0; }
};

/// Adds dt times the current instantaneous MSE to the running integral.
void accumulate_mse(EstimatorTrace& trace, const EstimatorState& state, const WorldState& world, double dt,
                    Point fallback_origin, std::optional<double> unseen_penalty = std::nullopt);

void write_trace_csv(std::ostream& out, const EstimatorTrace& trace);

}  // namespace fbgather
