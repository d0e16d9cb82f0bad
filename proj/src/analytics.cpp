#include "fbgather/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbgather/geometry.hpp"

namespace fbgather {

double power_diff(std::span<const SetTerm> sets, double uplink_power, double downlink_power) {
    double total = 0.0;
    for (const auto& s : sets) {
        if (s.informed >= s.set_size) throw std::invalid_argument("power_diff: |I_k| must be < |J|");
        total += s.n_c * (s.informed * (uplink_power + downlink_power) - s.set_size * downlink_power);
    }
    return total;
}

double expected_informed(double x, int set_size) {
    if (set_size < 2) throw std::invalid_argument("expected_informed: |J| must be >= 2");
    if (!(x >= 0.0)) throw std::invalid_argument("expected_informed: x must be >= 0");
    if (x >= 1.0) return 0.0;
    const double j = set_size;
    return std::pow(x, j) - j * x + (j - 1.0);
}

OracleEstimate oracle_informed(double x, int set_size, long samples, Rng& rng) {
    if (samples < 1) throw std::invalid_argument("oracle_informed: samples must be >= 1");
    if (set_size < 2) throw std::invalid_argument("oracle_informed: |J| must be >= 2");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> b(static_cast<std::size_t>(set_size));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long s = 0; s < samples; ++s) {
        for (auto& v : b) v = unit(rng);
        const auto lead = static_cast<std::size_t>(std::min_element(b.begin(), b.end()) - b.begin());
        int informed = 0;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (j != lead && b[j] > b[lead] + x) ++informed;
        sum += informed;
        sum_sq += static_cast<double>(informed) * informed;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), samples};
}

double feasibility(int set_size) {
    if (set_size < 2) throw std::invalid_argument("feasibility: |J| must be >= 2");
    return 1.0 / (set_size - 1);
}

double advantage_poly(const AdvantageParams& p) {
    const double x = std::min(p.x, 1.0);
    const double j = p.set_size;
    // (1+y)(x^J - Jx + J - 1) - J expands to the textbook form; this grouping makes x = 1 exact
    return (1.0 + p.y) * (std::pow(x, j) - j * x + (j - 1.0)) - j;
}

bool power_advantageous(const AdvantageParams& p) { return p.x <= 1.0 && advantage_poly(p) > 0.0; }

namespace {

void require_positive(const MseAdvantageParams& p) {
    if (!(p.trigger_threshold > 0.0 && p.noise_std > 0.0 && p.sampling_period > 0.0 && p.uplink_delay > 0.0 &&
          p.min_unique > 0.0))
        throw std::invalid_argument("MSE advantage parameters must be positive");
}

}  // namespace

MseAdvantage mse_advantage(const MseAdvantageParams& p) {
    require_positive(p);
    MseAdvantage out;
    out.threshold = std::sqrt(std::max(0.0, 2.0 * p.sampling_period / (p.uplink_delay * p.min_unique) - 1.0));
    out.ratio = p.trigger_threshold / p.noise_std;
    out.satisfied = out.ratio > out.threshold;
    return out;
}

MseBounds mse_bounds(std::span<const SetTerm> sets, const MseAdvantageParams& p) {
    require_positive(p);
    double cancelled = 0.0;
    double imbalance = 0.0;
    for (const auto& s : sets) {
        if (s.informed >= s.set_size) throw std::invalid_argument("mse_bounds: |I_k| must be < |J|");
        cancelled += s.informed * s.n_c;
        imbalance += (1.0 / (s.set_size - s.informed) - 1.0 / s.set_size) * s.n_c;
    }
    const double var = p.noise_std * p.noise_std;
    const double eps2 = p.trigger_threshold * p.trigger_threshold;
    return {(eps2 + var) * p.min_unique * p.uplink_delay * cancelled, 2.0 * p.sampling_period * imbalance * var};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Advantageous: return "advantageous";
        case Verdict::NotAdvantageous: return "not-advantageous";
        case Verdict::Boundary: return "boundary";
    }
    return "?";
}

std::vector<AdvantagePoint> raster_region(int set_size, std::span<const double> xs, std::span<const double> ys) {
    std::vector<AdvantagePoint> out;
    out.reserve(xs.size() * ys.size());
    for (double x : xs)
        for (double y : ys) {
            AdvantagePoint pt;
            pt.params = {x, y, static_cast<double>(set_size)};
            pt.g = advantage_poly(pt.params);
            pt.theoretical = power_advantageous(pt.params) ? Verdict::Advantageous : Verdict::NotAdvantageous;
            out.push_back(pt);
        }
    return out;
}

double NetworkApproximation::mean_delay() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& s : sensors)
        if (s.included) {
            sum += s.delay;
            ++n;
        }
    return n ? sum / n : 0.0;
}

double NetworkApproximation::advantage_fraction(double backoff_interval, double y) const {
    int n = 0;
    int good = 0;
    for (const auto& s : sensors) {
        if (!s.included) continue;
        ++n;
        good += power_advantageous({s.delay / backoff_interval, y, s.set_size});
    }
    return n ? static_cast<double>(good) / n : 0.0;
}

bool NetworkApproximation::advantageous(double backoff_interval, double y) const {
    for (const auto& s : sensors)
        if (s.included) return advantage_fraction(backoff_interval, y) >= 0.5;
    return false;
}

NetworkApproximation approx_params(const Scenario& scenario) {
    std::vector<Point> positions;
    for (const auto& t : scenario.targets) positions.push_back(t.initial_position);
    const MembershipMap members = membership(scenario, positions);
    auto sets = collaborative_sets(scenario);
    for (const auto& m : members)
        if (m.size() >= 2 && std::find(sets.begin(), sets.end(), m) == sets.end())
            sets.insert(std::upper_bound(sets.begin(), sets.end(), m), m);
    const CollaborativeStructure structure = component_counts(members, sets, scenario.sensors.size());

    const auto& p = scenario.protocol;
    NetworkApproximation out;
    for (const auto& sensor : scenario.sensors) {
        SensorApproximation a;
        a.sensor = sensor.id;
        double weighted = 0.0, weight = 0.0, plain = 0.0;
        int count = 0;
        for (const auto& set : structure.sets) {
            if (!std::binary_search(set.members.begin(), set.members.end(), sensor.id)) continue;
            const double size = static_cast<double>(set.members.size());
            plain += size;
            ++count;
            weighted += size * set.n_c;
            weight += set.n_c;
        }
        a.included = count > 0;
        if (a.included) {
            a.set_size = weight > 0.0 ? weighted / weight : plain / count;
            for (const auto& m : members) {
                if (!std::binary_search(m.begin(), m.end(), sensor.id)) continue;
                a.packet_size += 1.0;
                if (m.size() >= 2) a.feedback_size += 1.0;
            }
            a.delay = a.packet_size * p.uplink_delay + a.feedback_size * p.downlink_delay;
            a.x = a.delay / p.backoff_interval;
        }
        out.sensors.push_back(a);
    }
    return out;
}

}  // namespace fbgather
