#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fbgather/analytics.hpp"
#include "fbgather/scenario.hpp"

namespace fbgather {

struct SweepSpec {
    Scenario base;
    std::vector<double> backoff_intervals;  // T_b values
    std::vector<double> uplink_powers;      // dp_u values; dp_d comes from base.costs
    int trials = 1;
    bool paired_seeds = true;
};

struct SweepRow {
    double backoff_interval = 0.0;
    double uplink_power = 0.0;
    double downlink_power = 0.0;
    Architecture architecture = Architecture::Feedback;
    double mean_power = 0.0;  // total power over the horizon divided by dp_u
    double se_power = 0.0;
    double mean_mse = 0.0;    // time-averaged MSE
    double se_mse = 0.0;
    long trials = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (T_b, dp_u, arch FB then NF)

    const SweepRow& find(double backoff_interval, double uplink_power, Architecture arch) const;
};

/// Throws std::invalid_argument on empty grids or trials < 1.
void check_sweep_spec(const SweepSpec& spec);

/// FB and NF runs for every grid point. Trial i uses seed base ^ i (NF shifted by `trials`
/// when seeds are unpaired). Results are identical for any `jobs`.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

/// Sweep config: {"scenario": <inline object or path>, "backoff_intervals": [...],
/// "uplink_powers": [...], "trials": N, "paired_seeds": true}
SweepSpec load_sweep_spec(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Symmetric equal-load layout: `set_size` disks sharing a common overlap that pins `n_c`
/// targets, plus `n_u` targets pinned in each sensor's exclusive region. Per-component delays
/// are chosen (dt_d = dt_u / 2) so every sensor's propagation delay equals `tau_target`.
/// Throws std::invalid_argument for set_size < 2 or geometrically infeasible requests.
Scenario assumption1_scenario(int set_size, int n_c, int n_u, double tau_target);

/// Backoff interval, sampling period, and horizon for one x cell of the region experiment.
/// T_s grows past T_b + 2 tau so no transmission is superseded by the next sample.
Scenario region_cell_scenario(const Scenario& base, double tau, double x);

struct RegionSpec {
    int set_size = 3;
    std::vector<double> xs;
    std::vector<double> ys;  // uplink / downlink power ratio
    int trials = 500;
    int n_c = 3;
    double tau = 9.0;
    std::uint64_t seed = 1;
};

/// Paired FB/NF trials per x; each y reprices the same runs with dp_d = 1, dp_u = y.
/// Empirical verdict: boundary when |mean| < 2 SE, else sign of the mean NF - FB power.
std::vector<AdvantagePoint> region_experiment(const RegionSpec& spec, int jobs = 1);

/// Theoretical vs empirical comparison on a general layout, with per-sensor approximations
/// standing in for the equal-load quantities. Points carry the T_b they were run at.
std::vector<AdvantagePoint> approx_region_experiment(const Scenario& scenario,
                                                     const std::vector<double>& backoff_intervals,
                                                     const std::vector<double>& ys, int trials, int jobs = 1);

struct RegionAgreement {
    int agree = 0;
    int disagree = 0;
    int boundary = 0;

    double fraction() const { return agree + disagree > 0 ? static_cast<double>(agree) / (agree + disagree) : 1.0; }
};

RegionAgreement score_region(const std::vector<AdvantagePoint>& points);

void write_region_csv(std::ostream& out, const std::vector<AdvantagePoint>& points);

}  // namespace fbgather
