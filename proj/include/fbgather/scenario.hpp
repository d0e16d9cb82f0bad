#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbgather {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);
double squared_distance(Point a, Point b);

/// Axis-aligned box, closed on all sides.
struct Box {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    bool contains(Point p) const;
    friend bool operator==(const Box&, const Box&) = default;
};

/// The region S = (0,width] x (0,height].
struct Environment {
    double width = 0.0;
    double height = 0.0;
    /// Grid spacing used when testing whether sensor disks intersect inside S.
    double grid_resolution = 0.05;

    bool contains(Point p) const;
    Point centroid() const { return {width / 2.0, height / 2.0}; }
    friend bool operator==(const Environment&, const Environment&) = default;
};

struct SensorSpec {
    int id = 0;
    Point center;
    double radius = 0.0;

    bool observes(Point p) const;
    friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct TargetSpec {
    int id = 0;
    Point initial_position;
    /// Optional confinement region; motion reflects off its walls instead of S's.
    std::optional<Box> box;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ProtocolParams {
    double sampling_period = 150.0;    // T_s
    double backoff_interval = 40.0;    // T_b
    double uplink_delay = 2.0;         // per component
    double downlink_delay = 1.0;       // per component
    double trigger_threshold = 2.0;    // epsilon
    double noise_std = 0.1;            // sigma
    double horizon = 900.0;            // T_sim
    /// Squared-error charged for a target the central unit has never estimated.
    /// Unset means squared distance from the environment centroid.
    std::optional<double> unseen_penalty;

    friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

struct CostParams {
    double uplink_power = 1.0;    // per uplinked component
    double downlink_power = 1.0;  // per fed-back component

    friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct DynamicsParams {
    double step_size = 3.0;          // jump length
    double event_period = 150.0;     // T_e
    double move_probability = 0.5;   // p

    friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

enum class Architecture { Feedback, NoFeedback };

std::string_view to_string(Architecture a);
std::optional<Architecture> parse_architecture(std::string_view s);

struct Scenario {
    Environment environment;
    std::vector<SensorSpec> sensors;
    std::vector<TargetSpec> targets;
    ProtocolParams protocol;
    DynamicsParams dynamics;
    CostParams costs;
    Architecture architecture = Architecture::NoFeedback;
    std::uint64_t seed = 0;
    /// Redraw every target's initial position uniformly in S (or its box) per trial.
    bool randomize_targets = false;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline constexpr std::size_t kMaxSensors = 64;

struct Violation {
    std::string field;    // e.g. "SensorSpec.radius"
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Deterministic, order-stable list of violated invariants; empty when valid.
std::vector<Violation> validate(const Scenario& scenario);

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(Violation v);
    const Violation& violation() const noexcept { return violation_; }

private:
    Violation violation_;
};

/// Raised when a scenario or config file cannot be opened or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a scenario document, applying `key.path=value` overrides first.
/// Throws ParseError on malformed text and ValidationError on the first violated invariant.
Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Throws ValidationError if `validate` reports anything.
void ensure_valid(const Scenario& scenario);

}  // namespace fbgather
