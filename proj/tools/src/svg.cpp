#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "common.hpp"

namespace tippingscope::cli {

namespace {

// fixed canvas; the plot area leaves room for the title, tick labels, and
// the axis captions
constexpr double kWidth = 860, kHeight = 540;
constexpr double kLeft = 80, kRight = 830, kTop = 50, kBottom = 480;
constexpr int kPaletteSize = 8;

std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0, hi = 1;

    void include(double v)
    {
        if (!std::isfinite(v))
            return;
        if (empty) {
            lo = hi = v;
            empty = false;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    // widen so that flat data and single points still get a drawable span
    void finish(double pad_fraction)
    {
        if (empty) {
            lo = 0;
            hi = 1;
        }
        if (lo == hi) {
            const double w = std::max(1.0, std::abs(lo) * 0.1);
            lo -= w;
            hi += w;
        }
        const double pad = (hi - lo) * pad_fraction;
        lo -= pad;
        hi += pad;
    }

    bool empty = true;
};

struct Frame {
    Range xr, yr;

    double X(double x) const { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft); }
    double Y(double y) const { return kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop); }
};

void open_svg(std::ostringstream& out, const std::string& title)
{
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
        << "\">\n";
    out << "<style>\n"
           "text{font-family:sans-serif;font-size:12px;fill:#222}\n"
           ".title{font-size:15px;font-weight:bold}\n"
           ".axis{stroke:#222;stroke-width:1;fill:none}\n"
           ".tick{stroke:#222;stroke-width:1}\n"
           ".s0{stroke:#1f77b4;fill:none;stroke-width:1.5}\n"
           ".s1{stroke:#d62728;fill:none;stroke-width:1.5}\n"
           ".s2{stroke:#2ca02c;fill:none;stroke-width:1.5}\n"
           ".s3{stroke:#9467bd;fill:none;stroke-width:1.5}\n"
           ".s4{stroke:#ff7f0e;fill:none;stroke-width:1.5}\n"
           ".s5{stroke:#8c564b;fill:none;stroke-width:1.5}\n"
           ".s6{stroke:#17becf;fill:none;stroke-width:1.5}\n"
           ".s7{stroke:#7f7f7f;fill:none;stroke-width:1.5}\n"
           ".m0{fill:#1f77b4;stroke:none}\n"
           ".m1{fill:#d62728;stroke:none}\n"
           ".m2{fill:#2ca02c;stroke:none}\n"
           ".m3{fill:#9467bd;stroke:none}\n"
           ".m4{fill:#ff7f0e;stroke:none}\n"
           ".m5{fill:#8c564b;stroke:none}\n"
           ".m6{fill:#17becf;stroke:none}\n"
           ".m7{fill:#7f7f7f;stroke:none}\n"
           ".c0{fill:#e6e6e6}\n"
           ".c1{fill:#aec7e8}\n"
           ".c2{fill:#98df8a}\n"
           ".c3{fill:#ffbb78}\n"
           ".c4{fill:#c5b0d5}\n"
           ".c5{fill:#f7b6d2}\n"
           ".c6{fill:#dbdb8d}\n"
           ".c7{fill:#9edae5}\n"
           "</style>\n";
    out << "<text class=\"title\" x=\"" << px(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\">"
        << escape(title) << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& fr, const std::string& x_label,
               const std::string& y_label)
{
    out << "<path class=\"axis\" d=\"M" << px(kLeft) << ' ' << px(kTop) << " L" << px(kLeft)
        << ' ' << px(kBottom) << " L" << px(kRight) << ' ' << px(kBottom) << " L" << px(kRight)
        << ' ' << px(kTop) << " Z\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = fr.xr.lo + i * (fr.xr.hi - fr.xr.lo) / kTicks;
        const double sx = fr.X(fx);
        out << "<line class=\"tick\" x1=\"" << px(sx) << "\" y1=\"" << px(kBottom)
            << "\" x2=\"" << px(sx) << "\" y2=\"" << px(kBottom + 5) << "\"/>\n";
        out << "<text x=\"" << px(sx) << "\" y=\"" << px(kBottom + 18)
            << "\" text-anchor=\"middle\">" << fmt(fx, 4) << "</text>\n";

        const double fy = fr.yr.lo + i * (fr.yr.hi - fr.yr.lo) / kTicks;
        const double sy = fr.Y(fy);
        out << "<line class=\"tick\" x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(sy)
            << "\" x2=\"" << px(kLeft) << "\" y2=\"" << px(sy) << "\"/>\n";
        out << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(sy + 4)
            << "\" text-anchor=\"end\">" << fmt(fy, 4) << "</text>\n";
    }
    out << "<text x=\"" << px((kLeft + kRight) / 2) << "\" y=\"" << px(kHeight - 14)
        << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << px((kTop + kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << px((kTop + kBottom) / 2)
        << ")\">" << escape(y_label) << "</text>\n";
}

void draw_legend(std::ostringstream& out, const std::vector<std::string>& labels,
                 const std::string& swatch_prefix, bool line_swatch)
{
    double y = kTop + 16;
    const double x = kRight - 180;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty())
            continue;
        const std::string cls = swatch_prefix + std::to_string(i % kPaletteSize);
        if (line_swatch)
            out << "<line class=\"" << cls << "\" x1=\"" << px(x) << "\" y1=\"" << px(y - 4)
                << "\" x2=\"" << px(x + 24) << "\" y2=\"" << px(y - 4) << "\"/>\n";
        else
            out << "<rect class=\"swatch " << cls << "\" x=\"" << px(x) << "\" y=\""
                << px(y - 12) << "\" width=\"24\" height=\"12\"/>\n";
        out << "<text x=\"" << px(x + 30) << "\" y=\"" << px(y) << "\">" << escape(labels[i])
            << "</text>\n";
        y += 18;
    }
}

} // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series)
{
    Frame fr;
    for (const Series& s : series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                fr.xr.include(s.x[i]);
                fr.yr.include(s.y[i]);
            }
        }
    }
    fr.xr.finish(0.04);
    fr.yr.finish(0.06);

    std::ostringstream out;
    open_svg(out, title);
    draw_axes(out, fr, x_label, y_label);

    std::vector<std::string> labels;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        labels.push_back(s.label);
        const std::string cls = (s.markers ? "m" : "s") + std::to_string(k % kPaletteSize);
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    continue;
                out << "<circle class=\"" << cls << "\" cx=\"" << px(fr.X(s.x[i])) << "\" cy=\""
                    << px(fr.Y(s.y[i])) << "\" r=\"3\"/>\n";
            }
            continue;
        }
        std::ostringstream pts;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            if (kept++)
                pts << ' ';
            pts << px(fr.X(s.x[i])) << ',' << px(fr.Y(s.y[i]));
        }
        if (kept >= 2)
            out << "<polyline class=\"" << cls << "\" points=\"" << pts.str() << "\"/>\n";
    }
    draw_legend(out, labels, "s", /*line_swatch=*/true);
    out << "</svg>\n";
    return out.str();
}

std::string heatmap_chart(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const Heatmap& map)
{
    const std::size_t nx = map.x_edges.empty() ? 0 : map.x_edges.size() - 1;
    const std::size_t ny = map.y_edges.empty() ? 0 : map.y_edges.size() - 1;

    Frame fr;
    for (double v : map.x_edges)
        fr.xr.include(v);
    for (double v : map.y_edges)
        fr.yr.include(v);
    fr.xr.finish(0.0);
    fr.yr.finish(0.0);

    std::ostringstream out;
    open_svg(out, title);

    out << "<g id=\"cells\">\n";
    std::set<int> seen;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const int id = map.cell[iy * nx + ix];
            seen.insert(id);
            const double x0 = fr.X(map.x_edges[ix]), x1 = fr.X(map.x_edges[ix + 1]);
            const double y0 = fr.Y(map.y_edges[iy + 1]), y1 = fr.Y(map.y_edges[iy]);
            out << "<rect class=\"c" << (id % kPaletteSize) << "\" x=\"" << px(x0) << "\" y=\""
                << px(y0) << "\" width=\"" << px(x1 - x0) << "\" height=\"" << px(y1 - y0)
                << "\"/>\n";
        }
    }
    out << "</g>\n";

    draw_axes(out, fr, x_label, y_label);
    std::vector<std::string> labels(map.class_labels.size());
    for (std::size_t i = 0; i < map.class_labels.size(); ++i)
        if (seen.count(static_cast<int>(i)))
            labels[i] = map.class_labels[i];
    draw_legend(out, labels, "c", /*line_swatch=*/false);
    out << "</svg>\n";
    return out.str();
}

} // namespace tippingscope::cli
