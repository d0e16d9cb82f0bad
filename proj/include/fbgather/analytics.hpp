#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fbgather/rng.hpp"
#include "fbgather/scenario.hpp"

namespace fbgather {

/// One collaborative set's contribution at one step.
struct SetTerm {
    double n_c = 0;       // collaborative components
    double informed = 0;  // |I_k|
    double set_size = 0;  // |J|
};

/// P_k^NF - P_k^FB = sum_J n_c (|I_k| (dp_u + dp_d) - |J| dp_d).
/// Exact for integer-valued inputs. Throws std::invalid_argument if any |I_k| >= |J|.
double power_diff(std::span<const SetTerm> sets, double uplink_power, double downlink_power);

/// E[|I_k| | tau] = x^|J| - |J| x + (|J| - 1) for x in [0,1]; 0 for x > 1.
/// Throws std::invalid_argument for set_size < 2 or x < 0.
double expected_informed(double x, int set_size);

struct OracleEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    long samples = 0;
};

/// Monte Carlo E[|I_k|]: b_j ~ U[0,1] i.i.d., lead = argmin b (lowest index on ties),
/// counts the non-lead j with b_j > b_lead + x.
OracleEstimate oracle_informed(double x, int set_size, long samples, Rng& rng);

/// Smallest cost ratio y above which FB can beat NF: 1 / (|J| - 1).
double feasibility(int set_size);

/// x = lead propagation delay / T_b; y = uplink / downlink power per component; |J|.
struct AdvantageParams {
    double x = 0.0;
    double y = 0.0;
    double set_size = 2;  // integer for exact layouts; fractional for network-averaged estimates
};

/// g = (1+y) x^|J| - |J| (1+y) x + (|J|-1) y - 1; FB is power-advantageous iff g > 0.
/// x > 1 is evaluated at x = 1.
double advantage_poly(const AdvantageParams& params);
bool power_advantageous(const AdvantageParams& params);

struct MseAdvantageParams {
    double trigger_threshold = 0.0;  // epsilon
    double noise_std = 0.0;          // sigma
    double sampling_period = 0.0;    // T_s
    double uplink_delay = 0.0;       // dt_u
    double min_unique = 1.0;         // n_u^min over informed sensors
};

struct MseAdvantage {
    double threshold = 0.0;  // sqrt(max(0, 2 T_s / (dt_u n_u^min) - 1))
    double ratio = 0.0;      // epsilon / sigma
    bool satisfied = false;  // ratio > threshold
};

MseAdvantage mse_advantage(const MseAdvantageParams& params);

struct MseBounds {
    double advantage_lower = 0.0;     // (eps^2 + sigma^2) n_u^min dt_u sum |I| n_c
    double disadvantage_upper = 0.0;  // 2 T_s sum (1/(|J|-|I|) - 1/|J|) n_c sigma^2
};

/// Throws std::invalid_argument when some |I_k| >= |J| or a parameter is nonpositive.
MseBounds mse_bounds(std::span<const SetTerm> sets, const MseAdvantageParams& params);

enum class Verdict { Advantageous, NotAdvantageous, Boundary };

const char* to_string(Verdict v);

struct EmpiricalResult {
    double mean = 0.0;  // mean power difference NF - FB per step
    double standard_error = 0.0;
    long trials = 0;
    Verdict verdict = Verdict::Boundary;
};

struct AdvantagePoint {
    AdvantageParams params;
    double g = 0.0;
    Verdict theoretical = Verdict::NotAdvantageous;
    std::optional<EmpiricalResult> empirical;
    std::optional<double> backoff_interval;  // set when the point came from a T_b sweep
};

/// One point per (x, y) cell, x-major, with the closed-form verdict.
std::vector<AdvantagePoint> raster_region(int set_size, std::span<const double> xs, std::span<const double> ys);

/// Per-sensor inputs of the advantage condition for layouts that break the equal-load assumption.
struct SensorApproximation {
    int sensor = 0;
    bool included = false;     // false when the sensor is in no collaborative set
    double packet_size = 0.0;  // expected components per uplink
    double feedback_size = 0.0;
    double delay = 0.0;        // estimated tau
    double x = 0.0;            // delay / T_b
    double set_size = 0.0;     // estimated |J|
};

struct NetworkApproximation {
    std::vector<SensorApproximation> sensors;

    /// Mean over included sensors of tau.
    double mean_delay() const;
    /// Fraction of included sensors whose advantage condition holds at (T_b, y).
    double advantage_fraction(double backoff_interval, double y) const;
    /// advantage_fraction >= 0.5. False when no sensor is included.
    bool advantageous(double backoff_interval, double y) const;
};

NetworkApproximation approx_params(const Scenario& scenario);

}  // namespace fbgather
