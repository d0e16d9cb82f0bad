#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fbgather/estimation.hpp"
#include "fbgather/geometry.hpp"
#include "fbgather/packet.hpp"
#include "fbgather/scenario.hpp"

namespace fbgather {

enum class EventKind {
    Sample,
    Move,
    Trigger,
    BackoffSet,
    TxStart,
    TxEnd,
    FeedbackStart,
    FeedbackEnd,
    Cancel,
    Drop,
};

std::string_view to_string(EventKind kind);

struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::Sample;
    int sensor = kCentralUnit;  // kCentralUnit for SAMPLE/MOVE/feedback
    int step = -1;
    std::vector<int> targets;
    int size = 0;           // packet components; scheduled components for BACKOFF_SET
    int collaborative = 0;  // BACKOFF_SET only: scheduled collaborative components
    double backoff = 0.0;   // BACKOFF_SET only

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventLog {
    std::vector<EventRecord> records;
    int step_count = 0;
};

struct SensorCharge {
    long uplink_components = 0;
    long downlink_components = 0;
    double uplink = 0.0;
    double downlink = 0.0;
};

/// Per-step, per-sensor power charges. Uplink is charged to the sender at TX_START;
/// feedback is charged to the sensor whose packet elicited it. Both land on the packet's step.
class PowerLedger {
public:
    PowerLedger() = default;
    PowerLedger(int steps, int sensors);

    void charge_uplink(int step, int sensor, int components, double unit_cost);
    void charge_downlink(int step, int sensor, int components, double unit_cost);

    const SensorCharge& at(int step, int sensor) const;
    int steps() const { return steps_; }
    int sensors() const { return sensors_; }

    double total() const;
    long uplink_components() const;
    long downlink_components() const;

private:
    SensorCharge& cell(int step, int sensor);

    int steps_ = 0;
    int sensors_ = 0;
    std::vector<SensorCharge> cells_;
};

/// P_k: all uplink and downlink charges of step k.
double power_at_step(const PowerLedger& ledger, int step);

/// Lead / informed / uninformed split of one collaborative set at one step.
struct SetClassification {
    MemberSet members;
    MemberSet active;  // members that scheduled a transmission this step
    int lead = -1;
    MemberSet informed;
    MemberSet uninformed;
    double lead_delay = 0.0;  // tau of the lead: n*dt_u + m*dt_d
};

struct StepClassification {
    int step = 0;
    std::vector<SetClassification> sets;  // only sets with at least one active member
};

StepClassification classify_step(const EventLog& log, std::span<const MemberSet> sets, int step,
                                 const ProtocolParams& params);

struct TrialOptions {
    /// Replaces the drawn backoff of (step, sensor) when it returns a value.
    std::function<std::optional<double>(int step, int sensor)> backoff_override;
    bool record_events = true;
    bool record_trace = true;
    bool record_trajectory = false;
};

struct TrajectoryPoint {
    double time = 0.0;
    int target = 0;
    Point position;
};

struct TrialResult {
    EventLog log;
    PowerLedger ledger;
    EstimatorTrace trace;
    std::vector<MemberSet> sets;                      // collaborative sets used for attribution
    std::vector<CollaborativeStructure> structures;   // one per sampling step
    std::vector<TrajectoryPoint> trajectory;
    double mse = 0.0;        // time-averaged over the horizon
    int transmissions = 0;
    int feedbacks = 0;
    int cancels = 0;
    int drops = 0;
};

/// Simulates one trial of the scenario's architecture from time 0 to the horizon.
/// Randomness comes from streams seeded by `scenario.seed`.
TrialResult run_trial(const Scenario& scenario, const TrialOptions& options = {});

void write_events_csv(std::ostream& out, const EventLog& log);
void write_power_csv(std::ostream& out, const PowerLedger& ledger);
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> trajectory);

}  // namespace fbgather
