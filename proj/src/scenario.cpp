#include "fbgather/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fbgather/rng.hpp"
#include "scenario_json.hpp"

namespace fbgather {

using nlohmann::json;

double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

bool Box::contains(Point p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }

bool Environment::contains(Point p) const {
    return p.x > 0.0 && p.x <= width && p.y > 0.0 && p.y <= height;
}

bool SensorSpec::observes(Point p) const { return squared_distance(p, center) <= radius * radius; }

std::string_view to_string(Architecture a) { return a == Architecture::Feedback ? "FB" : "NF"; }

std::optional<Architecture> parse_architecture(std::string_view s) {
    if (s == "FB" || s == "fb") return Architecture::Feedback;
    if (s == "NF" || s == "nf") return Architecture::NoFeedback;
    return std::nullopt;
}

ValidationError::ValidationError(Violation v)
    : std::runtime_error(v.field + ": " + v.message), violation_(std::move(v)) {}

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string fmt_index(const char* what, std::size_t i) {
    std::ostringstream os;
    os << "(" << what << " " << i << ")";
    return os.str();
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
    std::vector<Violation> out;
    auto flag = [&out](std::string field, std::string message) {
        out.push_back({std::move(field), std::move(message)});
    };

    const Environment& env = s.environment;
    if (!finite_positive(env.width)) flag("Environment.width", "must be > 0");
    if (!finite_positive(env.height)) flag("Environment.height", "must be > 0");
    if (!finite_positive(env.grid_resolution)) flag("Environment.grid_resolution", "must be > 0");
    const bool env_ok = finite_positive(env.width) && finite_positive(env.height);

    if (s.sensors.empty()) flag("Scenario.sensors", "at least one sensor is required");
    if (s.sensors.size() > kMaxSensors) flag("Scenario.sensors", "at most 64 sensors are supported");
    for (std::size_t i = 0; i < s.sensors.size(); ++i) {
        const SensorSpec& sensor = s.sensors[i];
        if (!finite_positive(sensor.radius))
            flag("SensorSpec.radius", "must be > 0 " + fmt_index("sensor", i));
        if (env_ok && !env.contains(sensor.center))
            flag("SensorSpec.center", "must lie inside the environment " + fmt_index("sensor", i));
    }
    {
        std::set<int> ids;
        bool unique = true;
        for (const auto& sensor : s.sensors) unique = ids.insert(sensor.id).second && unique;
        if (!unique) {
            flag("SensorSpec.id", "ids must be unique");
        } else {
            for (std::size_t i = 0; i < s.sensors.size(); ++i) {
                if (s.sensors[i].id != static_cast<int>(i)) {
                    flag("SensorSpec.id", "ids must be contiguous 0..M-1 in list order");
                    break;
                }
            }
        }
    }

    if (s.targets.empty()) flag("Scenario.targets", "at least one target is required");
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const TargetSpec& t = s.targets[i];
        if (env_ok && !env.contains(t.initial_position))
            flag("TargetSpec.initial_position", "must lie inside the environment " + fmt_index("target", i));
        if (t.box) {
            const Box& b = *t.box;
            const bool ordered = b.xmin <= b.xmax && b.ymin <= b.ymax;
            if (!ordered || (env_ok && (!env.contains({b.xmin, b.ymin}) || !env.contains({b.xmax, b.ymax}))))
                flag("TargetSpec.box", "must be a non-inverted box inside the environment " + fmt_index("target", i));
            else if (!b.contains(t.initial_position))
                flag("TargetSpec.box", "must contain the initial position " + fmt_index("target", i));
        }
    }
    {
        std::set<int> ids;
        bool unique = true;
        for (const auto& t : s.targets) unique = ids.insert(t.id).second && unique;
        if (!unique) {
            flag("TargetSpec.id", "ids must be unique");
        } else {
            for (std::size_t i = 0; i < s.targets.size(); ++i) {
                if (s.targets[i].id != static_cast<int>(i)) {
                    flag("TargetSpec.id", "ids must be contiguous 0..N-1 in list order");
                    break;
                }
            }
        }
    }

    const ProtocolParams& p = s.protocol;
    if (!finite_positive(p.sampling_period)) flag("ProtocolParams.sampling_period", "must be > 0");
    if (!finite_positive(p.backoff_interval)) flag("ProtocolParams.backoff_interval", "must be > 0");
    if (!finite_positive(p.uplink_delay)) flag("ProtocolParams.uplink_delay", "must be > 0");
    if (!finite_positive(p.downlink_delay)) flag("ProtocolParams.downlink_delay", "must be > 0");
    if (!finite_positive(p.trigger_threshold)) flag("ProtocolParams.trigger_threshold", "must be > 0");
    if (!finite_positive(p.noise_std)) flag("ProtocolParams.noise_std", "must be > 0");
    if (!finite_positive(p.horizon)) flag("ProtocolParams.horizon", "must be > 0");
    if (p.unseen_penalty && !(std::isfinite(*p.unseen_penalty) && *p.unseen_penalty >= 0.0))
        flag("ProtocolParams.unseen_penalty", "must be >= 0");

    const DynamicsParams& d = s.dynamics;
    if (!finite_positive(d.step_size)) flag("DynamicsParams.step_size", "must be > 0");
    if (!finite_positive(d.event_period)) flag("DynamicsParams.event_period", "must be > 0");
    if (!(d.move_probability >= 0.0 && d.move_probability <= 1.0))
        flag("DynamicsParams.move_probability", "must be in [0,1]");

    if (!finite_positive(s.costs.uplink_power)) flag("CostParams.uplink_power", "must be > 0");
    if (!finite_positive(s.costs.downlink_power)) flag("CostParams.downlink_power", "must be > 0");
    return out;
}

void ensure_valid(const Scenario& scenario) {
    auto violations = validate(scenario);
    if (!violations.empty()) throw ValidationError(std::move(violations.front()));
}

namespace detail {

namespace {

Point point_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2) throw ParseError(std::string(field) + ": expected [x, y]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json point_to_json(Point p) { return json::array({p.x, p.y}); }

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

const json& section(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_object()) throw ParseError(std::string("missing section '") + key + "'");
    return *it;
}

std::vector<TargetSpec> random_targets(std::size_t count, const Environment& env, std::uint64_t seed) {
    Rng rng = make_stream(seed, Stream::Placement);
    std::uniform_real_distribution<double> ux(0.0, env.width), uy(0.0, env.height);
    std::vector<TargetSpec> out;
    for (std::size_t i = 0; i < count; ++i) {
        Point p{ux(rng), uy(rng)};
        // keep strictly inside (0, w] x (0, h]
        if (p.x <= 0.0) p.x = env.width;
        if (p.y <= 0.0) p.y = env.height;
        out.push_back({static_cast<int>(i), p, std::nullopt});
    }
    return out;
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ParseError("override key '" + key + "' has an empty component");
        json* next = nullptr;
        if (node->is_array()) {
            // numeric components index into arrays: sensors.0.radius=3
            std::size_t pos = 0;
            unsigned long index = 0;
            try {
                index = std::stoul(part, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != part.size() || index >= node->size())
                throw ParseError("override key '" + key + "': '" + part + "' is not a valid index");
            next = &(*node)[index];
        } else if (node->is_object() || node->is_null()) {
            next = &(*node)[part];
        } else {
            throw ParseError("override key '" + key + "' descends into a scalar");
        }
        if (dot == std::string::npos) {
            *next = value;
            return;
        }
        node = next;
        start = dot + 1;
    }
}

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("scenario document must be an object");
    Scenario s;
    try {
        const json& env = section(doc, "environment");
        s.environment.width = env.at("width").get<double>();
        s.environment.height = env.at("height").get<double>();
        read_opt(env, "grid_resolution", s.environment.grid_resolution);

        read_opt(doc, "seed", s.seed);
        read_opt(doc, "randomize_targets", s.randomize_targets);

        const json& sensors = doc.at("sensors");
        if (!sensors.is_array()) throw ParseError("'sensors' must be an array");
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            const json& js = sensors[i];
            SensorSpec sensor;
            sensor.id = js.contains("id") ? js.at("id").get<int>() : static_cast<int>(i);
            sensor.center = point_from_json(js.at("center"), "sensors[].center");
            sensor.radius = js.at("radius").get<double>();
            s.sensors.push_back(sensor);
        }

        const json& targets = doc.at("targets");
        if (targets.is_object()) {
            const auto count = targets.at("random").get<std::size_t>();
            s.targets = random_targets(count, s.environment, s.seed);
            s.randomize_targets = true;
        } else if (targets.is_array()) {
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const json& jt = targets[i];
                TargetSpec t;
                t.id = jt.contains("id") ? jt.at("id").get<int>() : static_cast<int>(i);
                t.initial_position = point_from_json(jt.at("position"), "targets[].position");
                if (auto it = jt.find("box"); it != jt.end()) {
                    if (!it->is_array() || it->size() != 4) throw ParseError("targets[].box: expected [xmin, ymin, xmax, ymax]");
                    t.box = Box{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(),
                                (*it)[3].get<double>()};
                }
                s.targets.push_back(t);
            }
        } else {
            throw ParseError("'targets' must be an array or {\"random\": N}");
        }

        const json& p = section(doc, "protocol");
        s.protocol.sampling_period = p.at("sampling_period").get<double>();
        s.protocol.backoff_interval = p.at("backoff_interval").get<double>();
        s.protocol.uplink_delay = p.at("uplink_delay").get<double>();
        s.protocol.downlink_delay = p.at("downlink_delay").get<double>();
        s.protocol.trigger_threshold = p.at("trigger_threshold").get<double>();
        s.protocol.noise_std = p.at("noise_std").get<double>();
        s.protocol.horizon = p.at("horizon").get<double>();
        if (auto it = p.find("unseen_penalty"); it != p.end() && !it->is_null())
            s.protocol.unseen_penalty = it->get<double>();

        const json& d = section(doc, "dynamics");
        s.dynamics.step_size = d.at("step_size").get<double>();
        s.dynamics.event_period = d.at("event_period").get<double>();
        s.dynamics.move_probability = d.at("move_probability").get<double>();

        const json& c = section(doc, "costs");
        s.costs.uplink_power = c.at("uplink_power").get<double>();
        s.costs.downlink_power = c.at("downlink_power").get<double>();

        if (auto it = doc.find("architecture"); it != doc.end()) {
            auto arch = parse_architecture(it->get<std::string>());
            if (!arch) throw ParseError("architecture must be \"FB\" or \"NF\"");
            s.architecture = *arch;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return s;
}

json scenario_to_json(const Scenario& s) {
    json doc;
    doc["environment"] = {{"width", s.environment.width},
                          {"height", s.environment.height},
                          {"grid_resolution", s.environment.grid_resolution}};
    json sensors = json::array();
    for (const auto& sensor : s.sensors)
        sensors.push_back({{"id", sensor.id}, {"center", point_to_json(sensor.center)}, {"radius", sensor.radius}});
    doc["sensors"] = std::move(sensors);
    json targets = json::array();
    for (const auto& t : s.targets) {
        json jt = {{"id", t.id}, {"position", point_to_json(t.initial_position)}};
        if (t.box) jt["box"] = {t.box->xmin, t.box->ymin, t.box->xmax, t.box->ymax};
        targets.push_back(std::move(jt));
    }
    doc["targets"] = std::move(targets);
    doc["randomize_targets"] = s.randomize_targets;
    json protocol = {{"sampling_period", s.protocol.sampling_period},
                     {"backoff_interval", s.protocol.backoff_interval},
                     {"uplink_delay", s.protocol.uplink_delay},
                     {"downlink_delay", s.protocol.downlink_delay},
                     {"trigger_threshold", s.protocol.trigger_threshold},
                     {"noise_std", s.protocol.noise_std},
                     {"horizon", s.protocol.horizon}};
    if (s.protocol.unseen_penalty) protocol["unseen_penalty"] = *s.protocol.unseen_penalty;
    doc["protocol"] = std::move(protocol);
    doc["dynamics"] = {{"step_size", s.dynamics.step_size},
                       {"event_period", s.dynamics.event_period},
                       {"move_probability", s.dynamics.move_probability}};
    doc["costs"] = {{"uplink_power", s.costs.uplink_power}, {"downlink_power", s.costs.downlink_power}};
    doc["architecture"] = std::string(to_string(s.architecture));
    doc["seed"] = s.seed;
    return doc;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false, /*ignore_comments=*/true);
    if (doc.is_discarded()) throw ParseError(path.string() + ": malformed JSON");
    return doc;
}

}  // namespace detail

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
    json doc = json::parse(text, nullptr, false, /*ignore_comments=*/true);
    if (doc.is_discarded()) throw ParseError("malformed JSON");
    for (const auto& o : overrides) detail::apply_override(doc, o);
    Scenario s = detail::scenario_from_json(doc);
    ensure_valid(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    json doc = detail::read_json_file(path);
    for (const auto& o : overrides) detail::apply_override(doc, o);
    Scenario s = detail::scenario_from_json(doc);
    ensure_valid(s);
    return s;
}

std::string serialize_scenario(const Scenario& scenario) {
    // max_digits10 round-trips doubles exactly
    return detail::scenario_to_json(scenario).dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << serialize_scenario(scenario);
}

}  // namespace fbgather
