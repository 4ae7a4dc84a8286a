#include "banach_ar1/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace banach_ar1::harness {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v) const {
        const double t = log ? std::log10(v) : v;
        return (t - lo) / (hi - lo);
    }
    double value_at(double frac) const {
        const double t = lo + frac * (hi - lo);
        return log ? std::pow(10.0, t) : t;
    }
};

Axis fit_axis(std::span<const Series> series, bool use_x, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && v <= 0.0)) {
                continue;
            }
            const double t = log ? std::log10(v) : v;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        const double pad = std::max(std::abs(lo) * 0.1, 0.5);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

}  // namespace

std::string svg_line_chart(std::span<const Series> series, const ChartOptions& options) {
    const Axis ax = fit_axis(series, true, options.log_x);
    const Axis ay = fit_axis(series, false, options.log_y);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double v) { return kLeft + ax.map(v) * pw; };
    const auto py = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(options.title) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double x = kLeft + f * pw;
        const double y = kTop + (1.0 - f) * ph;
        out << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 5
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
            << num(ax.value_at(f)) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(ay.value_at(f))
            << "</text>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
        << escape(options.x_label) << (options.log_x ? " (log)" : "") << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kTop + ph / 2 << ")\">" << escape(options.y_label) << (options.log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        out << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"2\""
            << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
            if ((options.log_x && ser.x[i] <= 0.0) || (options.log_y && ser.y[i] <= 0.0)) {
                continue;
            }
            out << (first ? "" : " ") << num(px(ser.x[i])) << ',' << num(py(ser.y[i]));
            first = false;
        }
        out << "\"/>\n";
        const double ly = kTop + 12 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 36 << "\" y2=\""
            << ly << "\" stroke=\"" << ser.color << "\" stroke-width=\"2\""
            << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(ser.name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace banach_ar1::harness
