#include "fbgather/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "csv.hpp"

namespace fbgather {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Axis {
    double lo = 0.0;
    double hi = 1.0;

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

Axis empty_axis() {
    return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
}

void header(std::ostream& out, const char* title, const char* xlabel, const char* ylabel) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
        << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
        << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void ticks(std::ostream& out, const Axis& ax, const Axis& ay) {
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double px = kMargin + f * (kWidth - 2 * kMargin);
        const double py = kHeight - kMargin - f * (kHeight - 2 * kMargin);
        out << "<text x=\"" << px << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">"
            << csv::num(std::round((ax.lo + f * ax.span()) * 1000) / 1000) << "</text>\n";
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
            << csv::num(std::round((ay.lo + f * ay.span()) * 1000) / 1000) << "</text>\n";
    }
}

double to_px(const Axis& a, double v) { return kMargin + (v - a.lo) / a.span() * (kWidth - 2 * kMargin); }
double to_py(const Axis& a, double v) {
    return kHeight - kMargin - (v - a.lo) / a.span() * (kHeight - 2 * kMargin);
}

}  // namespace

void write_sweep_svg(std::ostream& out, const SweepResult& result, double uplink_power) {
    Axis ax = empty_axis(), ay = empty_axis();
    std::vector<const SweepRow*> fb, nf;
    for (const auto& r : result.rows) {
        if (r.uplink_power != uplink_power) continue;
        (r.architecture == Architecture::Feedback ? fb : nf).push_back(&r);
        ax.include(r.mean_power);
        ay.include(r.mean_mse);
    }
    if (fb.empty() && nf.empty()) ax = ay = Axis{};
    const std::string title = "MSE vs normalized power, dp_u = " + csv::num(uplink_power);
    header(out, title.c_str(), "total power / dp_u", "time-averaged MSE");
    ticks(out, ax, ay);
    auto curve = [&](const std::vector<const SweepRow*>& rows, const char* color, const char* label, double ly) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto* r : rows) out << to_px(ax, r->mean_power) << ',' << to_py(ay, r->mean_mse) << ' ';
        out << "\"/>\n";
        for (const auto* r : rows) {
            const double px = to_px(ax, r->mean_power), py = to_py(ay, r->mean_mse);
            // dashed outline once backoff exceeds the sampling period is not known here; mark T_b instead
            out << "<path d=\"M" << px << ' ' << py - 5 << " L" << px + 5 << ' ' << py << " L" << px << ' ' << py + 5
                << " L" << px - 5 << ' ' << py << " Z\" fill=\"" << color << "\"><title>T_b="
                << csv::num(r->backoff_interval) << "</title></path>\n";
        }
        out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << color
            << "\">" << label << "</text>\n";
    };
    curve(nf, "gray", "NF", kMargin + 16);
    curve(fb, "crimson", "FB", kMargin + 32);
    out << "</svg>\n";
}

void write_region_svg(std::ostream& out, const std::vector<AdvantagePoint>& points) {
    std::set<double> xs, ys;
    for (const auto& p : points) {
        xs.insert(p.params.x);
        ys.insert(p.params.y);
    }
    header(out, "Power advantage region (shaded: theory, dots: simulation)", "x = tau / T_b", "y = dp_u / dp_d");
    if (points.empty()) {
        out << "</svg>\n";
        return;
    }
    const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
    const double cw = (kWidth - 2 * kMargin) / static_cast<double>(xv.size());
    const double ch = (kHeight - 2 * kMargin) / static_cast<double>(yv.size());
    auto index_of = [](const std::vector<double>& v, double value) {
        return static_cast<double>(std::lower_bound(v.begin(), v.end(), value) - v.begin());
    };
    for (const auto& p : points) {
        const double cx = kMargin + index_of(xv, p.params.x) * cw;
        const double cy = kHeight - kMargin - (index_of(yv, p.params.y) + 1) * ch;
        const char* fill = p.theoretical == Verdict::Advantageous ? "#9ecae1" : "#f0f0f0";
        out << "<rect x=\"" << cx << "\" y=\"" << cy << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
            << fill << "\" stroke=\"white\"><title>x=" << csv::num(p.params.x) << " y=" << csv::num(p.params.y)
            << " g=" << csv::num(p.g) << "</title></rect>\n";
        if (!p.empirical) continue;
        const char* dot = p.empirical->verdict == Verdict::Advantageous     ? "#08519c"
                          : p.empirical->verdict == Verdict::NotAdvantageous ? "#a50f15"
                                                                            : "#999999";
        out << "<circle cx=\"" << cx + cw / 2 << "\" cy=\"" << cy + ch / 2 << "\" r=\"" << std::min(cw, ch) / 5
            << "\" fill=\"" << dot << "\"/>\n";
    }
    for (std::size_t i = 0; i < xv.size(); ++i)
        out << "<text x=\"" << kMargin + (i + 0.5) * cw << "\" y=\"" << kHeight - kMargin + 16
            << "\" text-anchor=\"middle\">" << csv::num(std::round(xv[i] * 1000) / 1000) << "</text>\n";
    for (std::size_t i = 0; i < yv.size(); ++i)
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin - (i + 0.5) * ch + 4
            << "\" text-anchor=\"end\">" << csv::num(std::round(yv[i] * 1000) / 1000) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace fbgather
