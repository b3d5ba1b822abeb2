#include "ssanc/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ssanc/common.hpp"

namespace ssanc::svgplot {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 72, kRight = 24, kTop = 44, kBottom = 64;

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3a8f5d", "#8e5bb2", "#c98a2c", "#4aa3a3"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

// tick step of the form {1,2,5} * 10^k near range/5
double nice_step(double range) {
    if (!(range > 0)) return 1.0;
    double raw = range / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double r = raw / mag;
    double n = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
    return n * mag;
}

}  // namespace

void write_svg(const std::string& path, const Plot& plot) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series)
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin <= xmax)) xmin = 0, xmax = 1;
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 1, xmax += 1;
    if (ymax == ymin) ymin -= 1, ymax += 1;
    double ypad = 0.06 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_failure("cannot write plot file: " + path);
    char buf[512];

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\""
        << " text-anchor=\"middle\">" << esc(plot.title) << "</text>\n";

    // grid and ticks
    double xstep = nice_step(xmax - xmin), ystep = nice_step(ymax - ymin);
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
        double X = px(t);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", X,
                      kTop, X, kTop + ph);
        out << buf;
        out << "<text x=\"" << X << "\" y=\"" << kTop + ph + 16
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
        if (plot.x_ms_per_unit > 0)
            out << "<text x=\"" << X << "\" y=\"" << kTop + ph + 29
                << "\" text-anchor=\"middle\" font-size=\"9\" fill=\"#777\">("
                << fmt(t * plot.x_ms_per_unit) << " ms)</text>\n";
    }
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-9 * ystep; t += ystep) {
        double Y = py(t);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                      kLeft, Y, kLeft + pw, Y);
        out << buf;
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << Y + 4
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "</g>\n";

    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
        << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << esc(plot.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kTop + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 16 " << kTop + ph / 2 << ")\">" << esc(plot.y_label)
        << "</text>\n";

    for (size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
        // break the polyline at non-finite points
        std::string pts;
        auto flush = [&]() {
            if (pts.empty()) return;
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\""
                << pts << "\"/>\n";
            pts.clear();
        };
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(s.x[i]), py(s.y[i]));
            pts += buf;
        }
        flush();
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            double X = px(s.x[i]), Y = py(s.y[i]);
            bool capped = i < s.capped.size() && s.capped[i];
            if (capped) {
                // capped values get an open square so saturation is visible at a glance
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%.1f\" y=\"%.1f\" width=\"8\" height=\"8\" fill=\"white\""
                              " stroke=\"%s\" stroke-width=\"1.6\"/>\n",
                              X - 4, Y - 4, color);
            } else {
                std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                              X, Y, color);
            }
            out << buf;
        }
    }

    // legend, top right corner of the plot area
    double lx = kLeft + pw - 150, ly = kTop + 10;
    for (size_t si = 0; si < plot.series.size(); ++si) {
        const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
        double Y = ly + 16.0 * (double)si;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\""
                      " stroke-width=\"2\"/>\n",
                      lx, Y, lx + 22, Y, color);
        out << buf;
        out << "<text x=\"" << lx + 28 << "\" y=\"" << Y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(plot.series[si].label)
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw io_failure("write failed: " + path);
}

}  // namespace ssanc::svgplot
