#include "vbpbb/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vbpbb::svg {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00".
    if (std::string_view(buf) == "-0.00") return "0.00";
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width, height;
    double x_lo, x_hi, y_lo, y_hi;

    double x(double v) const {
        const double span = x_hi - x_lo;
        const double frac = span > 0.0 ? (v - x_lo) / span : 0.5;
        return kMarginLeft + frac * (width - kMarginLeft - kMarginRight);
    }
    double y(double v) const {
        const double span = y_hi - y_lo;
        const double frac = span > 0.0 ? (v - y_lo) / span : 0.5;
        return height - kMarginBottom - frac * (height - kMarginTop - kMarginBottom);
    }
};

void pad_range(double& lo, double& hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        lo = -1.0;
        hi = 1.0;
        return;
    }
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(hi)) * 0.05;
    lo -= pad;
    hi += pad;
}

void open_document(std::ostringstream& out, const PlotOptions& options) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(options.width) << "\" height=\"" << fmt(options.height)
        << "\" viewBox=\"0 0 " << fmt(options.width) << ' ' << fmt(options.height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(options.width) << "\" height=\"" << fmt(options.height) << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out << "<text x=\"" << fmt(options.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
            << escape(options.title) << "</text>\n";
    }
}

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& options) {
    const double x0 = kMarginLeft;
    const double x1 = f.width - kMarginRight;
    const double y0 = f.height - kMarginBottom;
    const double y1 = kMarginTop;
    out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y0) << "\"/>\n";
    out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y1) << "\"/>\n";
    out << "</g>\n";
    out << "<g class=\"y-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
        out << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(f.y(v) + 4) << "\">" << label << "</text>\n";
    }
    out << "</g>\n";
    if (!options.y_label.empty()) {
        out << "<text x=\"16\" y=\"" << fmt((y0 + y1) / 2) << "\" transform=\"rotate(-90 16 " << fmt((y0 + y1) / 2)
            << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(options.y_label) << "</text>\n";
    }
}

// Ticks at the first day of each month inside [0, count).
void draw_month_ticks(std::ostringstream& out, const Frame& f, series::Date anchor, std::size_t count, bool with_year) {
    out << "<g class=\"x-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < count; ++i) {
        const std::chrono::year_month_day ymd{anchor + std::chrono::days(static_cast<long>(i))};
        if (static_cast<unsigned>(ymd.day()) != 1) continue;
        const unsigned month = static_cast<unsigned>(ymd.month());
        if (with_year && month != 1) continue;
        const double x = f.x(static_cast<double>(i));
        const double y = f.height - kMarginBottom;
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(y + 5)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y + 18) << "\">";
        if (with_year) out << static_cast<int>(ymd.year());
        else out << kMonths[month - 1];
        out << "</text>\n";
    }
    out << "</g>\n";
}

}  // namespace

BandStyle baseline_style(std::string label) {
    return BandStyle{std::move(label), "#d62728", 0.35, "#8b0000"};
}

BandStyle treatment_style(std::string label) {
    return BandStyle{std::move(label), "#1f5fbf", 0.6, "#0b2f6b"};
}

std::string emit_svg_bands(const std::vector<BandLayer>& layers, const PlotOptions& options) {
    if (layers.empty()) throw std::invalid_argument("emit_svg_bands: no bands");
    const std::size_t d = layers.front().band->period;
    double lo = 0.0, hi = 0.0;
    for (const auto& layer : layers) {
        if (layer.band->period != d) throw std::invalid_argument("emit_svg_bands: bands have different periods");
        for (std::size_t p = 0; p < d; ++p) {
            for (const double v : {layer.band->lower[p], layer.band->upper[p], layer.band->point[p]}) {
                if (!std::isfinite(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    pad_range(lo, hi);
    const Frame f{options.width, options.height, 0.0, static_cast<double>(d > 1 ? d - 1 : 1), lo, hi};

    std::ostringstream out;
    open_document(out, options);
    draw_axes(out, f, options);
    draw_month_ticks(out, f, layers.front().band->anchor_date, d, false);

    for (const auto& layer : layers) {
        const auto& band = *layer.band;
        out << "<g class=\"band\" data-label=\"" << escape(layer.style.label) << "\">\n";
        out << "<polygon fill=\"" << layer.style.fill << "\" fill-opacity=\"" << fmt(layer.style.fill_opacity)
            << "\" stroke=\"none\" points=\"";
        bool first = true;
        for (std::size_t p = 0; p < d; ++p) {
            if (!std::isfinite(band.upper[p]) || !std::isfinite(band.lower[p])) continue;
            out << (first ? "" : " ") << fmt(f.x(static_cast<double>(p))) << ',' << fmt(f.y(band.upper[p]));
            first = false;
        }
        for (std::size_t p = d; p-- > 0;) {
            if (!std::isfinite(band.upper[p]) || !std::isfinite(band.lower[p])) continue;
            out << ' ' << fmt(f.x(static_cast<double>(p))) << ',' << fmt(f.y(band.lower[p]));
        }
        out << "\"/>\n";
        out << "<polyline fill=\"none\" stroke=\"" << layer.style.stroke << "\" stroke-width=\"1.5\" points=\"";
        first = true;
        for (std::size_t p = 0; p < d; ++p) {
            if (!std::isfinite(band.point[p])) continue;
            out << (first ? "" : " ") << fmt(f.x(static_cast<double>(p))) << ',' << fmt(f.y(band.point[p]));
            first = false;
        }
        out << "\"/>\n</g>\n";
    }

    const double zero_y = f.y(0.0);
    out << "<line class=\"zero\" x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(zero_y) << "\" x2=\"" << fmt(options.width - kMarginRight)
        << "\" y2=\"" << fmt(zero_y) << "\" stroke=\"black\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";

    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double legend_x = kMarginLeft + 10;
    for (const auto& layer : layers) {
        if (layer.style.label.empty()) continue;
        out << "<rect x=\"" << fmt(legend_x) << "\" y=\"" << fmt(kMarginTop - 2) << "\" width=\"14\" height=\"10\" fill=\""
            << layer.style.fill << "\" fill-opacity=\"" << fmt(layer.style.fill_opacity) << "\"/>\n";
        out << "<text x=\"" << fmt(legend_x + 18) << "\" y=\"" << fmt(kMarginTop + 7) << "\">" << escape(layer.style.label) << "</text>\n";
        legend_x += 30 + 7.0 * static_cast<double>(layer.style.label.size());
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string emit_svg_band(const resample::BandEstimate& band, const BandStyle& style, const PlotOptions& options) {
    return emit_svg_bands({BandLayer{&band, style}}, options);
}

std::string emit_svg_series(const series::TimeSeries& series, const PlotOptions& options) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.is_missing(i)) continue;
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
    }
    pad_range(lo, hi);
    const Frame f{options.width, options.height, 0.0, static_cast<double>(series.size() > 1 ? series.size() - 1 : 1), lo, hi};

    std::ostringstream out;
    open_document(out, options);
    draw_axes(out, f, options);
    draw_month_ticks(out, f, series.start_date(), series.size(), true);

    out << "<g class=\"series\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\">\n";
    bool open = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.is_missing(i)) {
            if (open) out << "\"/>\n";
            open = false;
            continue;
        }
        out << (open ? " " : "<polyline points=\"") << fmt(f.x(static_cast<double>(i))) << ',' << fmt(f.y(series[i]));
        open = true;
    }
    if (open) out << "\"/>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace vbpbb::svg
