#include "vbpbb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbpbb::analysis {

namespace {

constexpr std::uint64_t kSummedSeriesStream = 999;
constexpr std::uint64_t kGsbbStreamBase = 1000;

std::string component_label(std::size_t harmonic, std::size_t period) {
    const std::string suffix = " (" + std::to_string(period) + " d)";
    if (harmonic == 1) return "fundamental" + suffix;
    return "harmonic " + std::to_string(harmonic) + suffix;
}

}  // namespace

std::vector<ComponentSpec> default_component_set(std::size_t base_period, std::size_t harmonics, std::optional<std::size_t> window,
                                                 spectral::EdgePolicy edge) {
    if (base_period == 0) throw std::invalid_argument("base period must be positive");
    if (harmonics == 0) throw std::invalid_argument("harmonic count must be positive");
    std::vector<ComponentSpec> specs;
    for (std::size_t h = 1; h <= harmonics; ++h) {
        ComponentSpec spec;
        spec.harmonic = h;
        spec.nu = static_cast<double>(h) / static_cast<double>(base_period);
        spec.period = static_cast<std::size_t>(std::llround(static_cast<double>(base_period) / static_cast<double>(h)));
        if (spec.period == 0) throw std::invalid_argument("harmonic " + std::to_string(h) + " rounds to a zero period");
        spec.filter.m = window.value_or(2 * base_period + 1);
        spec.filter.k = 1;
        spec.filter.nu = spec.nu;
        spec.filter.edge_policy = edge;
        spec.filter.validate();
        spec.label = component_label(h, spec.period);
        specs.push_back(std::move(spec));
    }
    return specs;
}

series::TimeSeries centered(const series::TimeSeries& s) {
    const double mean = s.mean();
    if (std::isnan(mean)) throw std::invalid_argument("cannot center a series with no present values");
    std::vector<double> values(s.values().begin(), s.values().end());
    for (auto& v : values) v -= mean;
    return series::TimeSeries(s.start_date(), std::move(values), s.missing_mask(), s.unit());
}

series::TimeSeries sum_series(const std::vector<const series::TimeSeries*>& parts) {
    if (parts.empty()) throw std::invalid_argument("sum_series: nothing to sum");
    const std::size_t n = parts.front()->size();
    std::vector<double> values(n, 0.0);
    std::vector<bool> missing(n, false);
    for (const auto* part : parts) {
        if (part->size() != n) throw std::invalid_argument("sum_series: length mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (part->is_missing(i)) missing[i] = true;
            else values[i] += (*part)[i];
        }
    }
    return series::TimeSeries(parts.front()->start_date(), std::move(values), std::move(missing), parts.front()->unit());
}

double r_squared(const series::TimeSeries& component, const series::TimeSeries& original) {
    if (component.size() != original.size()) throw std::invalid_argument("r_squared: series lengths differ");
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        if (component.is_missing(i) || original.is_missing(i)) continue;
        sx += component[i];
        sy += original[i];
        ++count;
    }
    if (count < 2) throw std::invalid_argument("r_squared: fewer than 2 jointly present points");
    const double mx = sx / static_cast<double>(count);
    const double my = sy / static_cast<double>(count);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        if (component.is_missing(i) || original.is_missing(i)) continue;
        const double dx = component[i] - mx;
        const double dy = original[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("r_squared: zero-variance input");
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

double width_ratio(const resample::BandEstimate& baseline, const resample::BandEstimate& treatment) {
    if (baseline.period != treatment.period) throw std::invalid_argument("width_ratio: bands have different periods");
    const double base = baseline.mean_width();
    const double treat = treatment.mean_width();
    if (std::isnan(base) || std::isnan(treat)) throw std::invalid_argument("width_ratio: incomplete band");
    if (!(treat > 0.0)) throw std::domain_error("width_ratio: treatment band has zero width");
    return base / treat;
}

resample::BandEstimate combine_components(const std::vector<ComponentReplicates>& components, std::size_t base_period,
                                          series::Date anchor) {
    if (components.empty()) throw std::invalid_argument("combine_components: no components");
    if (base_period == 0) throw std::invalid_argument("combine_components: base period must be positive");
    const std::size_t replicates = components.front().replicates->replicates;
    for (const auto& c : components) {
        if (c.replicates->replicates != replicates) throw std::invalid_argument("combine_components: replicate counts differ");
        if (c.replicates->period == 0 || c.point->values.size() != c.replicates->period) {
            throw std::invalid_argument("combine_components: malformed component");
        }
    }

    resample::PhaseMeans point;
    point.values.assign(base_period, 0.0);
    point.missing.assign(base_period, false);
    resample::ReplicateMatrix matrix;
    matrix.replicates = replicates;
    matrix.period = base_period;
    matrix.data.assign(replicates * base_period, 0.0);

    for (const auto& c : components) {
        const std::size_t d = c.replicates->period;
        for (std::size_t tau = 0; tau < base_period; ++tau) {
            const std::size_t phase = tau % d;
            point.values[tau] += c.point->values[phase];
            if (c.point->missing[phase]) point.missing[tau] = true;
            for (std::size_t j = 0; j < replicates; ++j) {
                matrix.data[j * base_period + tau] += c.replicates->data[j * d + phase];
            }
        }
    }
    return resample::band_from_replicates(point, matrix, anchor, resample::Method::PBB);
}

VbpbbReport vbpbb_pipeline(const series::TimeSeries& input, const std::vector<ComponentSpec>& specs, const PipelineOptions& options) {
    if (specs.empty()) throw std::invalid_argument("vbpbb_pipeline: no components");
    const auto series = centered(input);

    VbpbbReport report;
    for (const auto& spec : specs) report.base_period = std::max(report.base_period, spec.period);

    for (std::size_t c = 0; c < specs.size(); ++c) {
        const auto& spec = specs[c];
        auto component = spectral::bandpass_component(spectral::kzft_apply(series, spec.filter));

        resample::BootstrapConfig cfg;
        cfg.method = resample::Method::PBB;
        cfg.period = spec.period;
        cfg.block_length = spec.period;
        cfg.replicates = options.replicates;
        cfg.master_seed = options.seed;
        cfg.stream = c + 1;
        cfg.threads = options.threads;

        auto point = resample::periodic_mean(component, spec.period);
        auto replicates = resample::bootstrap_replicates(component, cfg);
        auto band = resample::band_from_replicates(point, replicates, component.start_date(), resample::Method::PBB);
        auto significance = resample::significance_classify(band);
        const double r2 = r_squared(component, input);

        if (significance.significant) report.significant.push_back(c);
        report.components.push_back(ComponentResult{spec, std::move(component), std::move(point), std::move(replicates),
                                                    std::move(band), std::move(significance), r2});
    }

    if (report.significant.empty()) return report;

    std::vector<const series::TimeSeries*> parts;
    for (const std::size_t c : report.significant) parts.push_back(&report.components[c].component);
    const auto summed = sum_series(parts);
    report.aggregate_r_squared = r_squared(summed, input);

    if (options.combine == CombineMode::SumOfComponents) {
        std::vector<ComponentReplicates> inputs;
        for (const std::size_t c : report.significant) {
            inputs.push_back({&report.components[c].point, &report.components[c].replicates});
        }
        report.combined = combine_components(inputs, report.base_period, input.start_date());
    } else {
        resample::BootstrapConfig cfg;
        cfg.method = resample::Method::PBB;
        cfg.period = report.base_period;
        cfg.block_length = report.base_period;
        cfg.replicates = options.replicates;
        cfg.master_seed = options.seed;
        cfg.stream = kSummedSeriesStream;
        cfg.threads = options.threads;
        report.combined = resample::bootstrap_band(summed, cfg);
    }
    return report;
}

GsbbResult gsbb_pipeline(const series::TimeSeries& series, std::size_t d, std::size_t b, std::size_t replicates, std::uint64_t seed,
                         std::size_t threads, std::uint64_t stream) {
    resample::BootstrapConfig cfg;
    cfg.method = resample::Method::GSBB;
    cfg.period = d;
    cfg.block_length = b;
    cfg.replicates = replicates;
    cfg.master_seed = seed;
    cfg.stream = stream;
    cfg.threads = threads;
    auto band = resample::bootstrap_band(series, cfg);
    auto significance = resample::significance_classify(band);
    return GsbbResult{std::move(band), std::move(significance)};
}

AnalysisReport analyze(const series::TimeSeries& series, std::size_t base_period, const std::vector<ComponentSpec>& specs,
                       const AnalysisOptions& options) {
    AnalysisReport report;
    report.base_period = base_period;
    report.specs = specs;
    const bool run_vbpbb = options.methods != MethodSelection::Gsbb;
    const bool run_gsbb = options.methods != MethodSelection::Vbpbb;

    if (run_vbpbb) report.vbpbb = vbpbb_pipeline(series, specs, options.pipeline);
    if (run_gsbb) {
        const auto raw = centered(series);
        const std::size_t b = options.block_length.value_or(base_period);
        for (std::size_t c = 0; c < specs.size(); ++c) {
            ComparisonRow row;
            row.component = c;
            row.gsbb = gsbb_pipeline(raw, specs[c].period, b, options.pipeline.replicates, options.pipeline.seed,
                                     options.pipeline.threads, kGsbbStreamBase + c);
            if (report.vbpbb) {
                try {
                    row.width_ratio = width_ratio(row.gsbb.band, report.vbpbb->components[c].band);
                } catch (const std::domain_error&) {
                    row.width_ratio.reset();
                }
            }
            report.gsbb.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace vbpbb::analysis
