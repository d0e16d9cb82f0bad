#include "fbgather/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "csv.hpp"
#include "fbgather/protocol.hpp"
#include "fbgather/rng.hpp"
#include "fbgather/stats.hpp"
#include "scenario_json.hpp"

namespace fbgather {

namespace {

/// Architecture-independent outcome of one trial; power is repriced per cost point.
struct TrialTally {
    long uplink_components = 0;
    long downlink_components = 0;
    int steps = 1;
    double mse = 0.0;
};

TrialTally run_tally(Scenario scenario, Architecture arch, std::uint64_t seed) {
    scenario.architecture = arch;
    scenario.seed = seed;
    TrialOptions opt;
    opt.record_events = false;
    opt.record_trace = false;
    const TrialResult r = run_trial(scenario, opt);
    return {r.ledger.uplink_components(), r.ledger.downlink_components(), r.ledger.steps(), r.mse};
}

double price(const TrialTally& t, double uplink_power, double downlink_power) {
    return static_cast<double>(t.uplink_components) * uplink_power +
           static_cast<double>(t.downlink_components) * downlink_power;
}

Verdict empirical_verdict(double mean, double se) {
    if (std::abs(mean) < 2.0 * se) return Verdict::Boundary;
    return mean > 0.0 ? Verdict::Advantageous : Verdict::NotAdvantageous;
}

}  // namespace

const SweepRow& SweepResult::find(double backoff_interval, double uplink_power, Architecture arch) const {
    for (const auto& r : rows)
        if (r.backoff_interval == backoff_interval && r.uplink_power == uplink_power && r.architecture == arch)
            return r;
    throw std::out_of_range("no sweep row for the requested grid point");
}

void check_sweep_spec(const SweepSpec& spec) {
    if (spec.backoff_intervals.empty()) throw std::invalid_argument("sweep: backoff_intervals is empty");
    if (spec.uplink_powers.empty()) throw std::invalid_argument("sweep: uplink_powers is empty");
    if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    for (double tb : spec.backoff_intervals)
        if (!(tb > 0.0)) throw std::invalid_argument("sweep: backoff intervals must be > 0");
    for (double p : spec.uplink_powers)
        if (!(p > 0.0)) throw std::invalid_argument("sweep: uplink powers must be > 0");
    ensure_valid(spec.base);
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    check_sweep_spec(spec);
    const std::size_t n_tb = spec.backoff_intervals.size();
    const auto trials = static_cast<std::size_t>(spec.trials);

    // tallies[(tb * trials + trial) * 2 + arch]
    std::vector<TrialTally> tallies(n_tb * trials * 2);
    parallel_for(n_tb * trials, jobs, [&](std::size_t task) {
        const std::size_t tb = task / trials;
        const std::size_t trial = task % trials;
        Scenario s = spec.base;
        s.protocol.backoff_interval = spec.backoff_intervals[tb];
        const std::uint64_t fb_seed = trial_seed(spec.base.seed, trial);
        const std::uint64_t nf_seed = spec.paired_seeds ? fb_seed : trial_seed(spec.base.seed, trial + trials);
        tallies[task * 2] = run_tally(s, Architecture::Feedback, fb_seed);
        tallies[task * 2 + 1] = run_tally(s, Architecture::NoFeedback, nf_seed);
    });

    SweepResult result;
    const double dp_d = spec.base.costs.downlink_power;
    for (std::size_t tb = 0; tb < n_tb; ++tb)
        for (double dp_u : spec.uplink_powers)
            for (int a = 0; a < 2; ++a) {
                RunningStats power, mse;
                for (std::size_t trial = 0; trial < trials; ++trial) {
                    const TrialTally& t = tallies[(tb * trials + trial) * 2 + static_cast<std::size_t>(a)];
                    power.add(price(t, dp_u, dp_d) / dp_u);
                    mse.add(t.mse);
                }
                SweepRow row;
                row.backoff_interval = spec.backoff_intervals[tb];
                row.uplink_power = dp_u;
                row.downlink_power = dp_d;
                row.architecture = a == 0 ? Architecture::Feedback : Architecture::NoFeedback;
                row.mean_power = power.mean();
                row.se_power = power.standard_error();
                row.mean_mse = mse.mean();
                row.se_mse = mse.standard_error();
                row.trials = power.count();
                result.rows.push_back(row);
            }
    return result;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    nlohmann::json doc = detail::read_json_file(path);
    for (const auto& o : overrides) detail::apply_override(doc, o);
    SweepSpec spec;
    try {
        const auto& sc = doc.at("scenario");
        if (sc.is_string()) {
            std::filesystem::path sub = sc.get<std::string>();
            if (sub.is_relative()) sub = path.parent_path() / sub;
            nlohmann::json base = detail::read_json_file(sub);
            if (auto it = doc.find("scenario_overrides"); it != doc.end())
                for (const auto& o : *it) detail::apply_override(base, o.get<std::string>());
            spec.base = detail::scenario_from_json(base);
        } else {
            spec.base = detail::scenario_from_json(sc);
        }
        spec.backoff_intervals = doc.at("backoff_intervals").get<std::vector<double>>();
        spec.uplink_powers = doc.at("uplink_powers").get<std::vector<double>>();
        spec.trials = doc.value("trials", 1);
        spec.paired_seeds = doc.value("paired_seeds", true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sweep spec: ") + e.what());
    }
    ensure_valid(spec.base);
    check_sweep_spec(spec);
    return spec;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "# fbgather sweep v1\n";
    out << "T_b,dp_u,dp_d,arch,mean_power_norm,se_power,mean_mse,se_mse,trials\n";
    for (const auto& r : result.rows)
        out << csv::num(r.backoff_interval) << ',' << csv::num(r.uplink_power) << ',' << csv::num(r.downlink_power)
            << ',' << to_string(r.architecture) << ',' << csv::num(r.mean_power) << ',' << csv::num(r.se_power) << ','
            << csv::num(r.mean_mse) << ',' << csv::num(r.se_mse) << ',' << r.trials << '\n';
}

// ---------------------------------------------------------------------------
// Equal-load layouts

namespace {

constexpr double kLayoutRadius = 10.0;
constexpr double kCenterOffset = 4.0;
constexpr double kUniqueHalfSize = 0.25;

bool box_inside_disk(const Box& b, const SensorSpec& s) {
    for (Point corner : {Point{b.xmin, b.ymin}, Point{b.xmin, b.ymax}, Point{b.xmax, b.ymin}, Point{b.xmax, b.ymax}})
        if (!s.observes(corner)) return false;
    return true;
}

bool box_clear_of_disk(const Box& b, const SensorSpec& s) {
    const Point nearest{std::clamp(s.center.x, b.xmin, b.xmax), std::clamp(s.center.y, b.ymin, b.ymax)};
    return distance(nearest, s.center) > s.radius;
}

}  // namespace

Scenario assumption1_scenario(int set_size, int n_c, int n_u, double tau_target) {
    if (set_size < 2) throw std::invalid_argument("assumption1_scenario: set_size must be >= 2");
    if (n_c < 1 || n_u < 0) throw std::invalid_argument("assumption1_scenario: need n_c >= 1 and n_u >= 0");
    if (!(tau_target > 0.0)) throw std::invalid_argument("assumption1_scenario: tau must be > 0");

    Scenario s;
    s.environment = {50.0, 50.0, 0.05};
    const Point c = s.environment.centroid();
    for (int j = 0; j < set_size; ++j) {
        const double a = 2.0 * std::numbers::pi * j / set_size;
        s.sensors.push_back({j, {c.x + kCenterOffset * std::cos(a), c.y + kCenterOffset * std::sin(a)}, kLayoutRadius});
    }

    const double h = 0.95 * (kLayoutRadius - kCenterOffset) / std::numbers::sqrt2;
    const Box common{c.x - h, c.y - h, c.x + h, c.y + h};
    for (const auto& sensor : s.sensors)
        if (!box_inside_disk(common, sensor)) throw std::invalid_argument("assumption1_scenario: no common overlap");
    for (int i = 0; i < n_c; ++i) {
        const double a = 2.0 * std::numbers::pi * (i + 0.5) / n_c;
        const double rad = n_c == 1 ? 0.0 : h / 2.0;
        s.targets.push_back({static_cast<int>(s.targets.size()), {c.x + rad * std::cos(a), c.y + rad * std::sin(a)}, common});
    }

    for (int j = 0; j < set_size && n_u > 0; ++j) {
        const double a = 2.0 * std::numbers::pi * j / set_size;
        const double reach = kCenterOffset + 0.8 * kLayoutRadius;
        const Point anchor{c.x + reach * std::cos(a), c.y + reach * std::sin(a)};
        const Box own{anchor.x - kUniqueHalfSize, anchor.y - kUniqueHalfSize, anchor.x + kUniqueHalfSize,
                      anchor.y + kUniqueHalfSize};
        if (!box_inside_disk(own, s.sensors[static_cast<std::size_t>(j)]))
            throw std::invalid_argument("assumption1_scenario: exclusive region does not fit");
        for (const auto& other : s.sensors)
            if (other.id != j && !box_clear_of_disk(own, other))
                throw std::invalid_argument("assumption1_scenario: sensors have no exclusive region for n_u > 0");
        for (int i = 0; i < n_u; ++i) {
            const double off = n_u == 1 ? 0.0 : -0.8 * kUniqueHalfSize + 1.6 * kUniqueHalfSize * i / (n_u - 1);
            s.targets.push_back({static_cast<int>(s.targets.size()),
                                 {anchor.x - off * std::sin(a), anchor.y + off * std::cos(a)}, own});
        }
    }

    // tau = (n_c + n_u) dt_u + n_c dt_d with dt_d = dt_u / 2
    const double dt_u = tau_target / (n_c + n_u + 0.5 * n_c);
    s.protocol.sampling_period = 150.0;
    s.protocol.backoff_interval = 40.0;
    s.protocol.uplink_delay = dt_u;
    s.protocol.downlink_delay = dt_u / 2.0;
    s.protocol.trigger_threshold = 0.2;
    s.protocol.noise_std = 0.01;
    s.protocol.horizon = 900.0;
    s.dynamics = {3.0, 150.0, 1.0};
    s.costs = {1.0, 1.0};
    s.architecture = Architecture::NoFeedback;
    s.seed = 1;
    ensure_valid(s);
    return s;
}

Scenario region_cell_scenario(const Scenario& base, double tau, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("region cell: x must be > 0 (x = 0 means T_b = infinity)");
    Scenario s = base;
    s.protocol.backoff_interval = tau / x;
    const double needed = std::ceil((s.protocol.backoff_interval + 2.0 * tau) / 10.0) * 10.0;
    s.protocol.sampling_period = std::max(150.0, needed);
    s.dynamics.event_period = s.protocol.sampling_period;
    s.protocol.horizon = 6.0 * s.protocol.sampling_period;
    return s;
}

std::vector<AdvantagePoint> region_experiment(const RegionSpec& spec, int jobs) {
    if (spec.trials < 1) throw std::invalid_argument("region: trials must be >= 1");
    for (double x : spec.xs)
        if (!(x > 0.0)) throw std::invalid_argument("region: x must be > 0 (x = 0 means T_b = infinity)");
    const Scenario base = assumption1_scenario(spec.set_size, spec.n_c, 0, spec.tau);
    const std::size_t n_x = spec.xs.size();
    const auto trials = static_cast<std::size_t>(spec.trials);

    std::vector<TrialTally> tallies(n_x * trials * 2);
    parallel_for(n_x * trials, jobs, [&](std::size_t task) {
        const std::size_t xi = task / trials;
        const std::size_t trial = task % trials;
        const Scenario s = region_cell_scenario(base, spec.tau, spec.xs[xi]);
        const std::uint64_t seed = trial_seed(spec.seed, trial);
        tallies[task * 2] = run_tally(s, Architecture::Feedback, seed);
        tallies[task * 2 + 1] = run_tally(s, Architecture::NoFeedback, seed);
    });

    std::vector<AdvantagePoint> points = raster_region(spec.set_size, spec.xs, spec.ys);
    for (std::size_t xi = 0; xi < n_x; ++xi)
        for (std::size_t yi = 0; yi < spec.ys.size(); ++yi) {
            AdvantagePoint& pt = points[xi * spec.ys.size() + yi];
            const double y = spec.ys[yi];
            RunningStats diff;
            for (std::size_t trial = 0; trial < trials; ++trial) {
                const TrialTally& fb = tallies[(xi * trials + trial) * 2];
                const TrialTally& nf = tallies[(xi * trials + trial) * 2 + 1];
                diff.add((price(nf, y, 1.0) - price(fb, y, 1.0)) / fb.steps);
            }
            pt.backoff_interval = spec.tau / spec.xs[xi];
            pt.empirical = EmpiricalResult{diff.mean(), diff.standard_error(), diff.count(),
                                           empirical_verdict(diff.mean(), diff.standard_error())};
        }
    return points;
}

std::vector<AdvantagePoint> approx_region_experiment(const Scenario& scenario,
                                                     const std::vector<double>& backoff_intervals,
                                                     const std::vector<double>& ys, int trials, int jobs) {
    if (trials < 1) throw std::invalid_argument("region: trials must be >= 1");
    ensure_valid(scenario);
    const std::size_t n_tb = backoff_intervals.size();
    const auto n_trials = static_cast<std::size_t>(trials);

    std::vector<TrialTally> tallies(n_tb * n_trials * 2);
    parallel_for(n_tb * n_trials, jobs, [&](std::size_t task) {
        Scenario s = scenario;
        s.protocol.backoff_interval = backoff_intervals[task / n_trials];
        const std::uint64_t seed = trial_seed(scenario.seed, task % n_trials);
        tallies[task * 2] = run_tally(s, Architecture::Feedback, seed);
        tallies[task * 2 + 1] = run_tally(s, Architecture::NoFeedback, seed);
    });

    const NetworkApproximation approx = approx_params(scenario);
    double size_sum = 0.0;
    int included = 0;
    for (const auto& a : approx.sensors)
        if (a.included) {
            size_sum += a.set_size;
            ++included;
        }
    const double mean_size = included ? size_sum / included : 0.0;

    std::vector<AdvantagePoint> points;
    for (std::size_t ti = 0; ti < n_tb; ++ti)
        for (double y : ys) {
            AdvantagePoint pt;
            const double tb = backoff_intervals[ti];
            pt.backoff_interval = tb;
            pt.params = {approx.mean_delay() / tb, y, mean_size};
            pt.g = included ? advantage_poly(pt.params) : std::nan("");
            pt.theoretical = approx.advantageous(tb, y) ? Verdict::Advantageous : Verdict::NotAdvantageous;
            RunningStats diff;
            for (std::size_t trial = 0; trial < n_trials; ++trial) {
                const TrialTally& fb = tallies[(ti * n_trials + trial) * 2];
                const TrialTally& nf = tallies[(ti * n_trials + trial) * 2 + 1];
                diff.add((price(nf, y, 1.0) - price(fb, y, 1.0)) / fb.steps);
            }
            pt.empirical = EmpiricalResult{diff.mean(), diff.standard_error(), diff.count(),
                                           empirical_verdict(diff.mean(), diff.standard_error())};
            points.push_back(pt);
        }
    return points;
}

RegionAgreement score_region(const std::vector<AdvantagePoint>& points) {
    RegionAgreement out;
    for (const auto& pt : points) {
        if (!pt.empirical) continue;
        if (pt.empirical->verdict == Verdict::Boundary)
            ++out.boundary;
        else if (pt.empirical->verdict == pt.theoretical)
            ++out.agree;
        else
            ++out.disagree;
    }
    return out;
}

void write_region_csv(std::ostream& out, const std::vector<AdvantagePoint>& points) {
    out << "# fbgather region v1\n";
    out << "x,y,set_size,g,theoretical,empirical_mean,empirical_se,empirical,T_b\n";
    for (const auto& pt : points) {
        out << csv::num(pt.params.x) << ',' << csv::num(pt.params.y) << ',' << csv::num(pt.params.set_size) << ','
            << csv::num(pt.g) << ',' << to_string(pt.theoretical) << ',';
        if (pt.empirical)
            out << csv::num(pt.empirical->mean) << ',' << csv::num(pt.empirical->standard_error) << ','
                << to_string(pt.empirical->verdict);
        else
            out << ",,";
        out << ',';
        if (pt.backoff_interval) out << csv::num(*pt.backoff_interval);
        out << '\n';
    }
}

}  // namespace fbgather
