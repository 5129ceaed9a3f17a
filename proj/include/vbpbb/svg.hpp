#pragma once

#include "vbpbb/resample.hpp"
#include "vbpbb/series.hpp"

#include <string>
#include <vector>

namespace vbpbb::svg {

struct BandStyle {
    std::string label;
    std::string fill = "#1f5fbf";
    double fill_opacity = 0.45;
    std::string stroke = "#0b2f6b";
};

/// Baseline red, drawn first and lighter; treatment blue, drawn on top.
[[nodiscard]] BandStyle baseline_style(std::string label = "GSBB");
[[nodiscard]] BandStyle treatment_style(std::string label = "VBPBB");

struct PlotOptions {
    double width = 900.0;
    double height = 420.0;
    std::string title;
    std::string y_label;
};

struct BandLayer {
    const resample::BandEstimate* band;
    BandStyle style;
};

/**
 * @brief Renders one or more bands over a single period.
 *
 * The x axis runs over phases 0..d-1 with month ticks taken from the band's
 * anchor date. Each layer is a filled polygon (upper edge forward, lower edge
 * back) followed by a polyline at the point estimate; layers paint in the
 * order given. A dashed zero line is drawn last. All coordinates are printed
 * with two decimals and the document has no timestamps or generated ids.
 * Every band must share one period.
 */
[[nodiscard]] std::string emit_svg_bands(const std::vector<BandLayer>& layers, const PlotOptions& options);

[[nodiscard]] std::string emit_svg_band(const resample::BandEstimate& band, const BandStyle& style, const PlotOptions& options);

/// Line plot of a full series against calendar dates (missing values break the line).
[[nodiscard]] std::string emit_svg_series(const series::TimeSeries& series, const PlotOptions& options);

}  // namespace vbpbb::svg
