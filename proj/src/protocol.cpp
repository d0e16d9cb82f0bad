#include "fbgather/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "csv.hpp"
#include "fbgather/dynamics.hpp"
#include "fbgather/rng.hpp"

namespace fbgather {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Sample: return "SAMPLE";
        case EventKind::Move: return "MOVE";
        case EventKind::Trigger: return "TRIGGER";
        case EventKind::BackoffSet: return "BACKOFF_SET";
        case EventKind::TxStart: return "TX_START";
        case EventKind::TxEnd: return "TX_END";
        case EventKind::FeedbackStart: return "FEEDBACK_START";
        case EventKind::FeedbackEnd: return "FEEDBACK_END";
        case EventKind::Cancel: return "CANCEL";
        case EventKind::Drop: return "DROP";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// PowerLedger

PowerLedger::PowerLedger(int steps, int sensors)
    : steps_(steps), sensors_(sensors), cells_(static_cast<std::size_t>(steps) * static_cast<std::size_t>(sensors)) {}

SensorCharge& PowerLedger::cell(int step, int sensor) {
    if (step < 0 || step >= steps_ || sensor < 0 || sensor >= sensors_)
        throw std::out_of_range("power ledger cell out of range");
    return cells_[static_cast<std::size_t>(step) * static_cast<std::size_t>(sensors_) + static_cast<std::size_t>(sensor)];
}

const SensorCharge& PowerLedger::at(int step, int sensor) const {
    return const_cast<PowerLedger*>(this)->cell(step, sensor);
}

void PowerLedger::charge_uplink(int step, int sensor, int components, double unit_cost) {
    SensorCharge& c = cell(step, sensor);
    c.uplink_components += components;
    c.uplink += components * unit_cost;
}

void PowerLedger::charge_downlink(int step, int sensor, int components, double unit_cost) {
    SensorCharge& c = cell(step, sensor);
    c.downlink_components += components;
    c.downlink += components * unit_cost;
}

double PowerLedger::total() const {
    double sum = 0.0;
    for (const auto& c : cells_) sum += c.uplink + c.downlink;
    return sum;
}

long PowerLedger::uplink_components() const {
    long sum = 0;
    for (const auto& c : cells_) sum += c.uplink_components;
    return sum;
}

long PowerLedger::downlink_components() const {
    long sum = 0;
    for (const auto& c : cells_) sum += c.downlink_components;
    return sum;
}

double power_at_step(const PowerLedger& ledger, int step) {
    double sum = 0.0;
    for (int j = 0; j < ledger.sensors(); ++j) {
        const SensorCharge& c = ledger.at(step, j);
        sum += c.uplink + c.downlink;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Event engine

namespace {

enum class QueuedKind { TxStart, TxEnd, FeedbackEnd, Move, Sample };

struct QueuedEvent {
    double time;
    QueuedKind kind;
    int sensor;
    std::uint64_t seq;
    int payload;  // packet index, token, or step
    std::uint64_t token;
};

struct QueueOrder {
    // std::priority_queue pops the largest, so "later" compares greater.
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        if (a.sensor != b.sensor) return a.sensor > b.sensor;
        return a.seq > b.seq;
    }
};

struct SensorRuntime {
    std::vector<std::optional<Point>> last_acknowledged;
    std::vector<Component> pending;
    bool scheduled = false;
    int pending_step = -1;
    std::uint64_t token = 0;
    double busy_until = 0.0;
};

std::vector<int> target_ids(std::span<const Component> comps) {
    std::vector<int> ids;
    ids.reserve(comps.size());
    for (const auto& c : comps) ids.push_back(c.target_id);
    return ids;
}

class TrialEngine {
public:
    TrialEngine(const Scenario& scenario, const TrialOptions& options)
        : s_(scenario),
          opt_(options),
          feedback_(scenario.architecture == Architecture::Feedback),
          motion_rng_(make_stream(scenario.seed, Stream::Motion)),
          noise_rng_(make_stream(scenario.seed, Stream::Noise)),
          backoff_rng_(make_stream(scenario.seed, Stream::Backoff)),
          world_(initial_world(scenario, scenario.seed)),
          estimator_(scenario.targets.size()) {
        const auto& p = s_.protocol;
        step_count_ = static_cast<int>(std::ceil(p.horizon / p.sampling_period));
        if (step_count_ < 1) step_count_ = 1;
        result_.ledger = PowerLedger(step_count_, static_cast<int>(s_.sensors.size()));
        result_.log.step_count = step_count_;
        result_.trace.record_points = opt_.record_trace;
        result_.sets = collaborative_sets(s_);
        runtime_.resize(s_.sensors.size());
        for (auto& r : runtime_) r.last_acknowledged.assign(s_.targets.size(), std::nullopt);
        collaborative_by_step_.resize(static_cast<std::size_t>(step_count_));
        if (opt_.record_trajectory) record_positions();
    }

    TrialResult run() {
        push({0.0, QueuedKind::Sample, kCentralUnit, 0, 0, 0});
        if (s_.dynamics.event_period < s_.protocol.horizon)
            push({s_.dynamics.event_period, QueuedKind::Move, kCentralUnit, 0, 0, 0});

        const double horizon = s_.protocol.horizon;
        double last = 0.0;
        while (!queue_.empty()) {
            const QueuedEvent ev = queue_.top();
            if (ev.time >= horizon) break;
            queue_.pop();
            advance_to(ev.time, last);
            last = ev.time;
            dispatch(ev);
        }
        advance_to(horizon, last);

        result_.mse = result_.trace.time_averaged(horizon);
        return std::move(result_);
    }

private:
    void push(QueuedEvent ev) {
        ev.seq = seq_++;
        queue_.push(ev);
    }

    void log(EventRecord rec) {
        if (opt_.record_events) result_.log.records.push_back(std::move(rec));
    }

    void advance_to(double t, double last) {
        accumulate_mse(result_.trace, estimator_, world_, t - last, s_.environment.centroid(),
                       s_.protocol.unseen_penalty);
    }

    void record_positions() {
        for (std::size_t t = 0; t < world_.positions.size(); ++t)
            result_.trajectory.push_back({world_.time, static_cast<int>(t), world_.positions[t]});
    }

    void dispatch(const QueuedEvent& ev) {
        switch (ev.kind) {
            case QueuedKind::Sample: on_sample(ev.time, ev.payload); break;
            case QueuedKind::Move: on_move(ev.time); break;
            case QueuedKind::TxStart: on_tx_start(ev.time, ev.sensor, ev.token); break;
            case QueuedKind::TxEnd: on_tx_end(ev.time, ev.payload); break;
            case QueuedKind::FeedbackEnd: on_feedback_end(ev.time, ev.payload); break;
        }
    }

    void on_move(double now) {
        world_ = step_targets(world_, s_.dynamics, s_.environment, s_.targets, motion_rng_);
        world_.time = now;
        log({now, EventKind::Move, kCentralUnit, current_step_, {}, 0, 0, 0.0});
        if (opt_.record_trajectory) record_positions();
        const double next = now + s_.dynamics.event_period;
        if (next < s_.protocol.horizon) push({next, QueuedKind::Move, kCentralUnit, 0, 0, 0});
    }

    void on_sample(double now, int step) {
        current_step_ = step;
        world_.time = now;
        log({now, EventKind::Sample, kCentralUnit, step, {}, 0, 0, 0.0});

        // Whatever did not go out before this sample is superseded.
        for (std::size_t j = 0; j < runtime_.size(); ++j) {
            SensorRuntime& r = runtime_[j];
            if (!r.scheduled) continue;
            log({now, EventKind::Drop, static_cast<int>(j), r.pending_step, target_ids(r.pending),
                 static_cast<int>(r.pending.size()), 0, 0.0});
            ++result_.drops;
            r.scheduled = false;
            r.pending.clear();
            ++r.token;
        }

        const MembershipMap members = membership(s_, world_.positions);
        for (const auto& m : members)
            if (m.size() >= 2 && std::find(result_.sets.begin(), result_.sets.end(), m) == result_.sets.end()) {
                // the grid missed a sliver; the target itself proves the intersection
                result_.sets.insert(std::upper_bound(result_.sets.begin(), result_.sets.end(), m), m);
            }
        result_.structures.push_back(component_counts(members, result_.sets, s_.sensors.size()));
        auto& collaborative = collaborative_by_step_[static_cast<std::size_t>(step)];
        collaborative.assign(s_.targets.size(), 0);
        for (std::size_t t = 0; t < members.size(); ++t) collaborative[t] = members[t].size() >= 2;

        const double eps = s_.protocol.trigger_threshold;
        std::uniform_real_distribution<double> backoff_dist(0.0, s_.protocol.backoff_interval);
        for (std::size_t j = 0; j < s_.sensors.size(); ++j) {
            const auto readings = measure(world_, s_.sensors[j], s_.protocol.noise_std, noise_rng_);
            double backoff = backoff_dist(backoff_rng_);
            if (opt_.backoff_override)
                if (auto forced = opt_.backoff_override(step, static_cast<int>(j))) backoff = *forced;

            SensorRuntime& r = runtime_[j];
            std::vector<Component> triggered;
            int collab_count = 0;
            for (const auto& m : readings) {
                const auto& ack = r.last_acknowledged[static_cast<std::size_t>(m.target_id)];
                if (ack && distance(m.value, *ack) <= eps) continue;
                triggered.push_back({m.target_id, m.value});
                collab_count += collaborative[static_cast<std::size_t>(m.target_id)];
            }
            if (triggered.empty()) continue;

            const int id = static_cast<int>(j);
            const auto ids = target_ids(triggered);
            log({now, EventKind::Trigger, id, step, ids, static_cast<int>(triggered.size()), 0, 0.0});
            log({now, EventKind::BackoffSet, id, step, ids, static_cast<int>(triggered.size()), collab_count,
                 backoff});
            r.pending = std::move(triggered);
            r.pending_step = step;
            r.scheduled = true;
            ++r.token;
            const double start = std::max(now + backoff, r.busy_until);
            push({start, QueuedKind::TxStart, id, 0, 0, r.token});
        }

        const double next = now + s_.protocol.sampling_period;
        if (step + 1 < step_count_ && next < s_.protocol.horizon)
            push({next, QueuedKind::Sample, kCentralUnit, 0, step + 1, 0});
    }

    void on_tx_start(double now, int sensor, std::uint64_t token) {
        SensorRuntime& r = runtime_[static_cast<std::size_t>(sensor)];
        if (!r.scheduled || r.token != token) return;  // dropped or fully cancelled
        Packet packet;
        packet.sensor_id = sensor;
        packet.step = r.pending_step;
        packet.components = std::move(r.pending);
        packet.start_time = now;
        packet.duration = static_cast<double>(packet.components.size()) * s_.protocol.uplink_delay;
        r.pending.clear();
        r.scheduled = false;
        r.busy_until = packet.end_time();

        const int n = static_cast<int>(packet.components.size());
        log({now, EventKind::TxStart, sensor, packet.step, target_ids(packet.components), n, 0, 0.0});
        result_.ledger.charge_uplink(packet.step, sensor, n, s_.costs.uplink_power);
        ++result_.transmissions;

        packets_.push_back(std::move(packet));
        owner_of_packet_.push_back(sensor);
        push({packets_.back().end_time(), QueuedKind::TxEnd, sensor, 0, static_cast<int>(packets_.size() - 1), 0});
    }

    void on_tx_end(double now, int index) {
        const Packet& packet = packets_[static_cast<std::size_t>(index)];
        const int sensor = packet.sensor_id;
        const int n = static_cast<int>(packet.components.size());
        log({now, EventKind::TxEnd, sensor, packet.step, target_ids(packet.components), n, 0, 0.0});
        estimator_.fuse(packet, now);

        SensorRuntime& r = runtime_[static_cast<std::size_t>(sensor)];
        for (const auto& c : packet.components)
            r.last_acknowledged[static_cast<std::size_t>(c.target_id)] = c.value;
        if (!feedback_) return;

        const auto& collaborative = collaborative_by_step_[static_cast<std::size_t>(packet.step)];
        Packet fb;
        fb.sensor_id = kCentralUnit;
        fb.step = packet.step;
        fb.start_time = now;
        for (const auto& c : packet.components)
            if (collaborative[static_cast<std::size_t>(c.target_id)])
                fb.components.push_back({c.target_id, estimator_.at(c.target_id).value});
        if (fb.components.empty()) return;
        fb.duration = static_cast<double>(fb.components.size()) * s_.protocol.downlink_delay;

        const int m = static_cast<int>(fb.components.size());
        log({now, EventKind::FeedbackStart, sensor, packet.step, target_ids(fb.components), m, 0, 0.0});
        result_.ledger.charge_downlink(packet.step, sensor, m, s_.costs.downlink_power);
        ++result_.feedbacks;

        packets_.push_back(std::move(fb));
        owner_of_packet_.push_back(sensor);
        push({packets_.back().end_time(), QueuedKind::FeedbackEnd, kCentralUnit, 0,
              static_cast<int>(packets_.size() - 1), 0});
    }

    void on_feedback_end(double now, int index) {
        const Packet& fb = packets_[static_cast<std::size_t>(index)];
        const int owner = owner_of_packet_[static_cast<std::size_t>(index)];
        log({now, EventKind::FeedbackEnd, owner, fb.step, target_ids(fb.components),
             static_cast<int>(fb.components.size()), 0, 0.0});

        SensorRuntime& own = runtime_[static_cast<std::size_t>(owner)];
        for (const auto& c : fb.components) own.last_acknowledged[static_cast<std::size_t>(c.target_id)] = c.value;

        const double eps = s_.protocol.trigger_threshold;
        for (std::size_t j = 0; j < runtime_.size(); ++j) {
            if (static_cast<int>(j) == owner) continue;
            SensorRuntime& r = runtime_[j];
            if (!r.scheduled) continue;
            std::vector<int> cancelled;
            std::erase_if(r.pending, [&](const Component& pc) {
                for (const auto& c : fb.components) {
                    if (c.target_id != pc.target_id) continue;
                    if (distance(c.value, pc.value) > eps) return false;
                    r.last_acknowledged[static_cast<std::size_t>(pc.target_id)] = c.value;
                    cancelled.push_back(pc.target_id);
                    return true;
                }
                return false;
            });
            if (cancelled.empty()) continue;
            log({now, EventKind::Cancel, static_cast<int>(j), r.pending_step, cancelled,
                 static_cast<int>(cancelled.size()), 0, 0.0});
            result_.cancels += static_cast<int>(cancelled.size());
            if (r.pending.empty()) {
                r.scheduled = false;
                ++r.token;
            }
        }
    }

    const Scenario& s_;
    const TrialOptions& opt_;
    const bool feedback_;
    Rng motion_rng_;
    Rng noise_rng_;
    Rng backoff_rng_;
    WorldState world_;
    EstimatorState estimator_;
    std::vector<SensorRuntime> runtime_;
    std::vector<std::vector<char>> collaborative_by_step_;
    std::vector<Packet> packets_;
    std::vector<int> owner_of_packet_;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, QueueOrder> queue_;
    std::uint64_t seq_ = 0;
    int step_count_ = 1;
    int current_step_ = 0;
    TrialResult result_;
};

}  // namespace

TrialResult run_trial(const Scenario& scenario, const TrialOptions& options) {
    ensure_valid(scenario);
    return TrialEngine(scenario, options).run();
}

// ---------------------------------------------------------------------------
// Classification

StepClassification classify_step(const EventLog& log, std::span<const MemberSet> sets, int step,
                                 const ProtocolParams& params) {
    if (step < 0 || step >= log.step_count) throw std::out_of_range("step index out of range");

    struct Schedule {
        bool active = false;
        double backoff = 0.0;
        int planned = 0;
        int planned_collaborative = 0;
        int sent = -1;
        int fed_back = 0;
    };
    std::vector<Schedule> by_sensor;
    auto slot = [&by_sensor](int sensor) -> Schedule& {
        if (sensor >= static_cast<int>(by_sensor.size())) by_sensor.resize(static_cast<std::size_t>(sensor) + 1);
        return by_sensor[static_cast<std::size_t>(sensor)];
    };
    for (const auto& rec : log.records) {
        if (rec.step != step || rec.sensor < 0) continue;
        switch (rec.kind) {
            case EventKind::BackoffSet: {
                Schedule& s = slot(rec.sensor);
                s.active = true;
                s.backoff = rec.backoff;
                s.planned = rec.size;
                s.planned_collaborative = rec.collaborative;
                break;
            }
            case EventKind::TxStart: slot(rec.sensor).sent = rec.size; break;
            case EventKind::FeedbackStart: slot(rec.sensor).fed_back = rec.size; break;
            default: break;
        }
    }

    auto delay_of = [&params](const Schedule& s) {
        // sensors that transmitted use their actual packet sizes
        const int n = s.sent >= 0 ? s.sent : s.planned;
        const int m = s.sent >= 0 ? s.fed_back : s.planned_collaborative;
        return n * params.uplink_delay + m * params.downlink_delay;
    };

    StepClassification out;
    out.step = step;
    for (const auto& members : sets) {
        SetClassification c;
        c.members = members;
        for (int j : members)
            if (j < static_cast<int>(by_sensor.size()) && by_sensor[static_cast<std::size_t>(j)].active)
                c.active.push_back(j);
        if (c.active.empty()) continue;

        double best = std::numeric_limits<double>::infinity();
        for (int j : c.active) {  // ascending ids: strict < keeps the lowest index on ties
            const Schedule& s = by_sensor[static_cast<std::size_t>(j)];
            const double total = s.backoff + delay_of(s);
            if (total < best) {
                best = total;
                c.lead = j;
            }
        }
        const Schedule& lead = by_sensor[static_cast<std::size_t>(c.lead)];
        c.lead_delay = delay_of(lead);
        for (int j : c.active) {
            if (j == c.lead) continue;
            if (by_sensor[static_cast<std::size_t>(j)].backoff > lead.backoff + c.lead_delay)
                c.informed.push_back(j);
            else
                c.uninformed.push_back(j);
        }
        out.sets.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_events_csv(std::ostream& out, const EventLog& log) {
    out << "# fbgather events v1\n";
    out << "time,kind,sensor,step,targets,size,backoff\n";
    for (const auto& rec : log.records) {
        out << csv::num(rec.time) << ',' << to_string(rec.kind) << ',';
        if (rec.sensor >= 0) out << rec.sensor;
        out << ',' << rec.step << ',';
        for (std::size_t i = 0; i < rec.targets.size(); ++i) out << (i ? " " : "") << rec.targets[i];
        out << ',' << rec.size << ',';
        if (rec.kind == EventKind::BackoffSet) out << csv::num(rec.backoff);
        out << '\n';
    }
}

void write_power_csv(std::ostream& out, const PowerLedger& ledger) {
    out << "# fbgather power v1\n";
    out << "step,sensor,uplink,downlink\n";
    for (int k = 0; k < ledger.steps(); ++k)
        for (int j = 0; j < ledger.sensors(); ++j) {
            const SensorCharge& c = ledger.at(k, j);
            out << k << ',' << j << ',' << csv::num(c.uplink) << ',' << csv::num(c.downlink) << '\n';
        }
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> trajectory) {
    out << "# fbgather trajectory v1\n";
    out << "time,target_id,x,y\n";
    for (const auto& p : trajectory)
        out << csv::num(p.time) << ',' << p.target << ',' << csv::num(p.position.x) << ','
            << csv::num(p.position.y) << '\n';
}

}  // namespace fbgather
