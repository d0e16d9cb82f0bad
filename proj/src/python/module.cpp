#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fbgather/analytics.hpp"
#include "fbgather/experiments.hpp"
#include "fbgather/geometry.hpp"
#include "fbgather/protocol.hpp"
#include "fbgather/scenario.hpp"

namespace py = pybind11;
using namespace fbgather;

namespace {

Architecture arch_from(const std::string& s) {
    auto a = parse_architecture(s);
    if (!a) throw py::value_error("architecture must be FB or NF");
    return *a;
}

py::dict point_dict(const AdvantagePoint& p) {
    py::dict d;
    d["x"] = p.params.x;
    d["y"] = p.params.y;
    d["set_size"] = p.params.set_size;
    d["g"] = p.g;
    d["theoretical"] = to_string(p.theoretical);
    if (p.empirical) {
        d["mean"] = p.empirical->mean;
        d["se"] = p.empirical->standard_error;
        d["trials"] = p.empirical->trials;
        d["empirical"] = to_string(p.empirical->verdict);
    }
    if (p.backoff_interval) d["backoff_interval"] = *p.backoff_interval;
    return d;
}

template <typename F>
std::string to_text(F&& write) {
    std::ostringstream out;
    write(out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Feedback vs no-feedback data gathering simulator";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Scenario>(m, "Scenario")
        .def_static("from_json", [](const std::string& text, const std::vector<std::string>& overrides) {
            return parse_scenario(text, overrides);
        }, py::arg("text"), py::arg("overrides") = std::vector<std::string>{})
        .def_static("load", [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
            return load_scenario(path, overrides);
        }, py::arg("path"), py::arg("overrides") = std::vector<std::string>{})
        .def("to_json", &serialize_scenario)
        .def("violations", [](const Scenario& s) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : validate(s)) out.emplace_back(v.field, v.message);
            return out;
        })
        .def_readwrite("seed", &Scenario::seed)
        .def_property("architecture",
            [](const Scenario& s) { return std::string(to_string(s.architecture)); },
            [](Scenario& s, const std::string& a) { s.architecture = arch_from(a); })
        .def_property_readonly("sensor_count", [](const Scenario& s) { return s.sensors.size(); })
        .def_property_readonly("target_count", [](const Scenario& s) { return s.targets.size(); })
        .def("collaborative_sets", [](const Scenario& s) { return collaborative_sets(s); })
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

    m.def("run_trial", [](const Scenario& s, bool csv) {
        TrialOptions opt;
        opt.record_events = csv;
        opt.record_trace = csv;
        TrialResult r;
        {
            py::gil_scoped_release release;
            r = run_trial(s, opt);
        }
        py::dict d;
        d["architecture"] = std::string(to_string(s.architecture));
        d["mse"] = r.mse;
        d["power"] = r.ledger.total();
        d["uplink_components"] = r.ledger.uplink_components();
        d["downlink_components"] = r.ledger.downlink_components();
        d["transmissions"] = r.transmissions;
        d["feedbacks"] = r.feedbacks;
        d["cancels"] = r.cancels;
        d["drops"] = r.drops;
        if (csv) {
            d["events_csv"] = to_text([&](std::ostream& o) { write_events_csv(o, r.log); });
            d["power_csv"] = to_text([&](std::ostream& o) { write_power_csv(o, r.ledger); });
            d["mse_csv"] = to_text([&](std::ostream& o) { write_trace_csv(o, r.trace); });
        }
        return d;
    }, py::arg("scenario"), py::arg("csv") = false);

    m.def("expected_informed", &expected_informed, py::arg("x"), py::arg("set_size"));
    m.def("oracle_informed", [](double x, int set_size, long samples, std::uint64_t seed) {
        Rng rng(seed);
        const auto e = oracle_informed(x, set_size, samples, rng);
        return std::make_pair(e.mean, e.standard_error);
    }, py::arg("x"), py::arg("set_size"), py::arg("samples"), py::arg("seed") = 1);
    m.def("feasibility", &feasibility, py::arg("set_size"));
    m.def("advantage_poly", [](double x, double y, double j) { return advantage_poly({x, y, j}); },
          py::arg("x"), py::arg("y"), py::arg("set_size"));
    m.def("power_advantageous", [](double x, double y, double j) { return power_advantageous({x, y, j}); },
          py::arg("x"), py::arg("y"), py::arg("set_size"));
    m.def("power_diff", [](const std::vector<std::tuple<double, double, double>>& sets, double up, double down) {
        std::vector<SetTerm> terms;
        for (auto [n_c, informed, size] : sets) terms.push_back({n_c, informed, size});
        return power_diff(terms, up, down);
    }, py::arg("sets"), py::arg("uplink_power"), py::arg("downlink_power"));
    m.def("mse_advantage", [](double eps, double sigma, double ts, double dtu, double nu_min) {
        const auto a = mse_advantage({eps, sigma, ts, dtu, nu_min});
        py::dict d;
        d["threshold"] = a.threshold;
        d["ratio"] = a.ratio;
        d["satisfied"] = a.satisfied;
        return d;
    }, py::arg("eps"), py::arg("sigma"), py::arg("sampling_period"), py::arg("uplink_delay"),
       py::arg("min_unique") = 1.0);

    m.def("raster_region", [](int set_size, const std::vector<double>& xs, const std::vector<double>& ys) {
        py::list out;
        for (const auto& p : raster_region(set_size, xs, ys)) out.append(point_dict(p));
        return out;
    }, py::arg("set_size"), py::arg("xs"), py::arg("ys"));

    m.def("region_experiment", [](int set_size, const std::vector<double>& xs, const std::vector<double>& ys,
                                  int trials, int n_c, double tau, std::uint64_t seed, int jobs) {
        RegionSpec spec{set_size, xs, ys, trials, n_c, tau, seed};
        std::vector<AdvantagePoint> points;
        {
            py::gil_scoped_release release;
            points = region_experiment(spec, jobs);
        }
        py::list out;
        for (const auto& p : points) out.append(point_dict(p));
        return out;
    }, py::arg("set_size"), py::arg("xs"), py::arg("ys"), py::arg("trials") = 500, py::arg("n_c") = 3,
       py::arg("tau") = 9.0, py::arg("seed") = 1, py::arg("jobs") = 1);

    m.def("run_sweep", [](const std::filesystem::path& path, const std::vector<std::string>& overrides,
                          std::optional<int> trials, int jobs) {
        SweepSpec spec = load_sweep_spec(path, overrides);
        if (trials) spec.trials = *trials;
        SweepResult result;
        {
            py::gil_scoped_release release;
            result = run_sweep(spec, jobs);
        }
        py::list out;
        for (const auto& r : result.rows) {
            py::dict d;
            d["backoff_interval"] = r.backoff_interval;
            d["uplink_power"] = r.uplink_power;
            d["downlink_power"] = r.downlink_power;
            d["architecture"] = std::string(to_string(r.architecture));
            d["mean_power"] = r.mean_power;
            d["se_power"] = r.se_power;
            d["mean_mse"] = r.mean_mse;
            d["se_mse"] = r.se_mse;
            d["trials"] = r.trials;
            out.append(d);
        }
        return out;
    }, py::arg("path"), py::arg("overrides") = std::vector<std::string>{}, py::arg("trials") = py::none(),
       py::arg("jobs") = 1);
}
