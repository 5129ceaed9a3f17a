#pragma once

#include "vbpbb/resample.hpp"
#include "vbpbb/series.hpp"
#include "vbpbb/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vbpbb::analysis {

/// One periodic component: filter center, bootstrap period and filter settings.
struct ComponentSpec {
    std::string label;
    std::size_t harmonic = 1;
    double nu = 1.0 / 365.0;
    std::size_t period = 365;
    spectral::KzftConfig filter;
};

/**
 * @brief Fundamental plus harmonics of a base period.
 *
 * Harmonic h gets nu = h/base, period round(base/h), k = 1 and window
 * m = 2*base + 1 unless `window` pins one value for every harmonic.
 */
[[nodiscard]] std::vector<ComponentSpec> default_component_set(std::size_t base_period, std::size_t harmonics,
                                                               std::optional<std::size_t> window = std::nullopt,
                                                               spectral::EdgePolicy edge = spectral::EdgePolicy::Renormalize);

enum class CombineMode {
    SumOfComponents,  ///< add per-replicate component periodic means (independent streams)
    SummedSeries      ///< PBB once on the sum of the significant component series
};

struct PipelineOptions {
    std::size_t replicates = 10000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    CombineMode combine = CombineMode::SumOfComponents;
};

struct ComponentResult {
    ComponentSpec spec;
    series::TimeSeries component;  ///< bandpass reconstruction
    resample::PhaseMeans point;
    resample::ReplicateMatrix replicates;
    resample::BandEstimate band;
    resample::Significance significance;
    double r_squared = 0.0;
};

struct VbpbbReport {
    std::size_t base_period = 0;
    std::vector<ComponentResult> components;
    std::vector<std::size_t> significant;  ///< indices into components
    std::optional<resample::BandEstimate> combined;
    std::optional<double> aggregate_r_squared;
};

/**
 * @brief Filters, bootstraps and classifies every component.
 *
 * The input is centered on its mean before filtering. Component c draws its
 * replicates from stream c+1 of the seed. The combined band and aggregate R^2
 * are present only when at least one component is significant.
 */
[[nodiscard]] VbpbbReport vbpbb_pipeline(const series::TimeSeries& series, const std::vector<ComponentSpec>& specs,
                                         const PipelineOptions& options);

struct GsbbResult {
    resample::BandEstimate band;
    resample::Significance significance;
};

/// GSBB band for the periodic mean of the raw series at period d.
[[nodiscard]] GsbbResult gsbb_pipeline(const series::TimeSeries& series, std::size_t d, std::size_t b, std::size_t replicates,
                                       std::uint64_t seed, std::size_t threads = 0, std::uint64_t stream = 0);

/// Bootstrap output of one component, as needed to combine components.
struct ComponentReplicates {
    const resample::PhaseMeans* point;
    const resample::ReplicateMatrix* replicates;
};

/**
 * @brief Band over base period P for the sum of several components.
 *
 * Calendar day tau in [0, P) takes phase tau mod d_c from component c. The
 * replicate index pairs components, so every component must carry the same B.
 */
[[nodiscard]] resample::BandEstimate combine_components(const std::vector<ComponentReplicates>& components, std::size_t base_period,
                                                        series::Date anchor);

/// Squared correlation over jointly present indices.
[[nodiscard]] double r_squared(const series::TimeSeries& component, const series::TimeSeries& original);

/// Mean baseline width over mean treatment width.
[[nodiscard]] double width_ratio(const resample::BandEstimate& baseline, const resample::BandEstimate& treatment);

/// Series with its present-value mean subtracted.
[[nodiscard]] series::TimeSeries centered(const series::TimeSeries& series);

/// Elementwise sum; an index is missing if it is missing in any input.
[[nodiscard]] series::TimeSeries sum_series(const std::vector<const series::TimeSeries*>& parts);

struct ComparisonRow {
    std::size_t component = 0;       ///< index into VbpbbReport::components
    GsbbResult gsbb;
    std::optional<double> width_ratio;  ///< empty when the VBPBB band has zero width
};

enum class MethodSelection { Vbpbb, Gsbb, Both };

struct AnalysisOptions {
    MethodSelection methods = MethodSelection::Both;
    PipelineOptions pipeline;
    std::optional<std::size_t> block_length;  ///< GSBB; defaults to the base period
};

struct AnalysisReport {
    std::size_t base_period = 0;
    std::vector<ComponentSpec> specs;
    std::optional<VbpbbReport> vbpbb;
    std::vector<ComparisonRow> gsbb;  ///< one per spec when GSBB ran
};

/**
 * Runs the selected pipelines over the same component set. GSBB runs on the
 * mean-centered raw series at each component period so its bands describe the
 * same periodic mean variation as the VBPBB bands.
 */
[[nodiscard]] AnalysisReport analyze(const series::TimeSeries& series, std::size_t base_period,
                                     const std::vector<ComponentSpec>& specs, const AnalysisOptions& options);

}  // namespace vbpbb::analysis
