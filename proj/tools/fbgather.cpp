// fbgather: single trials, sweeps, region experiments and closed-form checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbgather/analytics.hpp"
#include "fbgather/experiments.hpp"
#include "fbgather/geometry.hpp"
#include "fbgather/plot.hpp"
#include "fbgather/protocol.hpp"
#include "fbgather/scenario.hpp"

namespace fs = std::filesystem;
using namespace fbgather;

namespace {

struct Common {
    std::string out;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool plot = false;
};

void add_common(CLI::App& cmd, Common& c, bool with_input_flags = true) {
    cmd.add_option("--out,-o", c.out, "Output directory (default: $FBGATHER_OUT or .)");
    if (!with_input_flags) return;
    cmd.add_option("--override", c.overrides, "Scenario override key.path=value (repeatable)");
    cmd.add_option("--seed", c.seed, "Base seed");
    cmd.add_option("--jobs,-j", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd.add_flag("--plot", c.plot, "Also write SVG plots");
}

fs::path out_dir(const Common& c) {
    std::string dir = c.out;
    if (dir.empty()) {
        const char* env = std::getenv("FBGATHER_OUT");
        dir = env && *env ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    return f;
}

void close_out(std::ofstream& f, const fs::path& path) {
    f.close();
    if (!f) throw IoError("write failed: " + path.string());
}

template <class Fn>
void emit(const fs::path& path, Fn&& fn) {
    auto f = open_out(path);
    fn(f);
    close_out(f, path);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

std::string tag(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

int cmd_simulate(const std::string& input, const Common& c, bool trajectory, bool structure) {
    Scenario s = load_scenario(input, c.overrides);
    if (c.seed) s.seed = *c.seed;
    TrialOptions opt;
    opt.record_trajectory = trajectory;
    const TrialResult r = run_trial(s, opt);
    const fs::path dir = out_dir(c);
    emit(dir / "events.csv", [&](std::ostream& o) { write_events_csv(o, r.log); });
    emit(dir / "power.csv", [&](std::ostream& o) { write_power_csv(o, r.ledger); });
    emit(dir / "mse.csv", [&](std::ostream& o) { write_trace_csv(o, r.trace); });
    if (trajectory)
        emit(dir / "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, r.trajectory); });
    if (structure && !r.structures.empty())
        emit(dir / "structure.csv", [&](std::ostream& o) { write_structure_csv(o, r.structures.front()); });
    std::cout << std::setprecision(10) << "arch=" << to_string(s.architecture)
              << " power_norm=" << r.ledger.total() / s.costs.uplink_power << " mse=" << r.mse
              << " transmissions=" << r.transmissions << " feedbacks=" << r.feedbacks << " cancels=" << r.cancels
              << " drops=" << r.drops << '\n';
    return 0;
}

int cmd_sweep(const std::string& input, const Common& c, const std::vector<double>& tbs,
              const std::vector<double>& dpus, std::optional<int> trials) {
    SweepSpec spec = load_sweep_spec(input, c.overrides);
    if (c.seed) spec.base.seed = *c.seed;
    if (!tbs.empty()) spec.backoff_intervals = tbs;
    if (!dpus.empty()) spec.uplink_powers = dpus;
    if (trials) spec.trials = *trials;
    check_sweep_spec(spec);
    const SweepResult result = run_sweep(spec, c.jobs);
    const fs::path dir = out_dir(c);
    emit(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, result); });
    if (c.plot)
        for (double dpu : spec.uplink_powers)
            emit(dir / ("sweep_dpu" + tag(dpu) + ".svg"),
                 [&](std::ostream& o) { write_sweep_svg(o, result, dpu); });
    std::cout << "rows=" << result.rows.size() << '\n';
    return 0;
}

struct RegionArgs {
    int set_size = 3;
    std::vector<double> xs = linspace(0.05, 0.95, 10);
    std::vector<double> ys = linspace(0.25, 10.0, 10);
    std::vector<double> tbs;
    int trials = 500;
    bool theory_only = false;
    std::string scenario;
    double tau = 9.0;
    int n_c = 3;
};

int cmd_region(const RegionArgs& a, const Common& c) {
    if (!a.theory_only && a.trials < 1) throw std::invalid_argument("region: --trials must be >= 1");
    std::vector<AdvantagePoint> points;
    if (!a.scenario.empty()) {
        Scenario s = load_scenario(a.scenario, c.overrides);
        if (c.seed) s.seed = *c.seed;
        if (a.tbs.empty()) throw std::invalid_argument("region: --scenario needs --tb-grid");
        if (a.theory_only) {
            const NetworkApproximation approx = approx_params(s);
            for (double tb : a.tbs)
                for (double y : a.ys) {
                    AdvantagePoint pt;
                    pt.backoff_interval = tb;
                    pt.params = {approx.mean_delay() / tb, y, 0.0};
                    pt.theoretical = approx.advantageous(tb, y) ? Verdict::Advantageous : Verdict::NotAdvantageous;
                    points.push_back(pt);
                }
        } else {
            points = approx_region_experiment(s, a.tbs, a.ys, a.trials, c.jobs);
        }
    } else if (a.theory_only) {
        if (a.set_size < 2) throw std::invalid_argument("region: --setsize must be >= 2");
        points = raster_region(a.set_size, a.xs, a.ys);
    } else {
        RegionSpec spec;
        spec.set_size = a.set_size;
        spec.xs = a.xs;
        spec.ys = a.ys;
        spec.trials = a.trials;
        spec.tau = a.tau;
        spec.n_c = a.n_c;
        if (c.seed) spec.seed = *c.seed;
        points = region_experiment(spec, c.jobs);
    }
    const fs::path dir = out_dir(c);
    emit(dir / "region.csv", [&](std::ostream& o) { write_region_csv(o, points); });
    if (c.plot) emit(dir / "region.svg", [&](std::ostream& o) { write_region_svg(o, points); });
    if (!a.theory_only) {
        const RegionAgreement score = score_region(points);
        std::cout << std::setprecision(4) << "agreement=" << 100.0 * score.fraction() << "% agree=" << score.agree
                  << " disagree=" << score.disagree << " boundary=" << score.boundary << '\n';
    } else {
        std::cout << "cells=" << points.size() << '\n';
    }
    return 0;
}

struct AnalyzeArgs {
    std::optional<double> x, y;
    int set_size = 3;
    std::optional<double> ts, dtu, eps, sigma;
    double numin = 1.0;
    std::string scenario;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
    std::cout << std::setprecision(6);
    if (!a.scenario.empty()) {
        const Scenario s = load_scenario(a.scenario, c.overrides);
        const NetworkApproximation approx = approx_params(s);
        for (const auto& sa : approx.sensors) {
            std::cout << "sensor " << sa.sensor;
            if (!sa.included) {
                std::cout << " excluded\n";
                continue;
            }
            std::cout << " tau " << sa.delay << " x " << sa.x << " setsize " << sa.set_size << '\n';
        }
        if (a.y)
            std::cout << "network " << (approx.advantageous(s.protocol.backoff_interval, *a.y) ? "advantageous"
                                                                                               : "not-advantageous")
                      << " fraction " << approx.advantage_fraction(s.protocol.backoff_interval, *a.y) << '\n';
        return 0;
    }
    const std::string setsize_note = " (setsize " + std::to_string(a.set_size) + ")";
    std::cout << "feasibility " << feasibility(a.set_size) << setsize_note << '\n';
    if (a.x) std::cout << "expected_informed " << expected_informed(*a.x, a.set_size) << '\n';
    if (a.x && a.y) {
        if (*a.x < 0.0 || *a.y < 0.0) throw std::invalid_argument("analyze: --x and --y must be >= 0");
        const AdvantageParams p{*a.x, *a.y, static_cast<double>(a.set_size)};
        std::cout << "g " << advantage_poly(p) << '\n'
                  << "power " << (power_advantageous(p) ? "advantageous" : "not-advantageous") << '\n';
    }
    if (a.ts || a.dtu || a.eps || a.sigma) {
        if (!(a.ts && a.dtu && a.eps && a.sigma))
            throw std::invalid_argument("analyze: MSE check needs --ts, --dtu, --eps and --sigma");
        const MseAdvantage m = mse_advantage({*a.eps, *a.sigma, *a.ts, *a.dtu, a.numin});
        std::cout << "threshold " << m.threshold << '\n'
                  << "ratio " << m.ratio << '\n'
                  << "mse " << (m.satisfied ? "satisfied" : "not-satisfied") << '\n';
    }
    return 0;
}

int cmd_validate(const std::string& input, const Common& c) {
    const Scenario s = load_scenario(input, c.overrides);
    std::cout << "ok: " << s.sensors.size() << " sensors, " << s.targets.size() << " targets, "
              << collaborative_sets(s).size() << " collaborative sets\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed data gathering with and without central feedback"};
    app.require_subcommand(1);
    Common common;

    std::string input;
    bool trajectory = false, structure = false;
    auto* sim = app.add_subcommand("simulate", "Run one trial and write events/power/mse CSVs");
    sim->add_option("scenario", input, "Scenario JSON")->required();
    sim->add_flag("--trajectory", trajectory, "Also write trajectory.csv");
    sim->add_flag("--structure", structure, "Also write structure.csv for the first step");
    add_common(*sim, common);

    std::vector<double> tbs, dpus;
    std::optional<int> sweep_trials;
    auto* sweep = app.add_subcommand("sweep", "FB/NF sweep over T_b and uplink power");
    sweep->add_option("spec", input, "Sweep spec JSON")->required();
    sweep->add_option("--tb", tbs, "Override backoff intervals")->delimiter(',');
    sweep->add_option("--dpu", dpus, "Override uplink powers")->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "Override trial count");
    add_common(*sweep, common);

    RegionArgs ra;
    auto* region = app.add_subcommand("region", "Theoretical vs empirical advantage region");
    region->add_option("--setsize", ra.set_size, "Collaborative set size |J|");
    region->add_option("--x-grid", ra.xs, "x values")->delimiter(',');
    region->add_option("--y-grid", ra.ys, "y values")->delimiter(',');
    region->add_option("--tb-grid", ra.tbs, "T_b values (with --scenario)")->delimiter(',');
    region->add_option("--trials", ra.trials, "Paired trials per cell");
    region->add_option("--tau", ra.tau, "Uniform propagation delay");
    region->add_option("--nc", ra.n_c, "Targets in the common overlap");
    region->add_option("--scenario", ra.scenario, "General layout; uses per-sensor approximations");
    region->add_flag("--theory-only", ra.theory_only, "Skip simulation");
    add_common(*region, common);

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Closed-form feasibility, g, and MSE threshold");
    analyze->add_option("--x", aa.x);
    analyze->add_option("--y", aa.y);
    analyze->add_option("--setsize", aa.set_size);
    analyze->add_option("--ts", aa.ts);
    analyze->add_option("--dtu", aa.dtu);
    analyze->add_option("--numin", aa.numin);
    analyze->add_option("--eps", aa.eps);
    analyze->add_option("--sigma", aa.sigma);
    analyze->add_option("--scenario", aa.scenario, "Per-sensor approximation for a layout");
    analyze->add_option("--override", common.overrides);

    auto* val = app.add_subcommand("validate", "Check a scenario file");
    val->add_option("scenario", input, "Scenario JSON")->required();
    val->add_option("--override", common.overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return cmd_simulate(input, common, trajectory, structure);
        if (*sweep) return cmd_sweep(input, common, tbs, dpus, sweep_trials);
        if (*region) return cmd_region(ra, common);
        if (*analyze) return cmd_analyze(aa, common);
        if (*val) return cmd_validate(input, common);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.violation().field << ": " << e.violation().message << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
