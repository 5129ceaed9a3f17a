#include "vbpbb/resample.hpp"

#include "vbpbb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vbpbb::resample {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void accumulate_phase_means(const series::TimeSeries& series, std::span<const std::size_t> sources, std::span<double> out,
                            std::vector<std::size_t>& counts) {
    const std::size_t d = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    const auto values = series.values();
    std::size_t phase = 0;
    for (const std::size_t src : sources) {
        if (!series.is_missing(src)) {
            out[phase] += values[src];
            ++counts[phase];
        }
        if (++phase == d) phase = 0;
    }
    for (std::size_t p = 0; p < d; ++p) out[p] = counts[p] ? out[p] / static_cast<double>(counts[p]) : kNaN;
}

series::TimeSeries gather(const series::TimeSeries& series, const std::vector<std::size_t>& sources) {
    std::vector<double> values(sources.size());
    std::vector<bool> missing(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        values[i] = series[sources[i]];
        missing[i] = series.is_missing(sources[i]);
    }
    return series::TimeSeries(series.start_date(), std::move(values), std::move(missing), series.unit());
}

}  // namespace

std::string to_string(Method method) {
    return method == Method::GSBB ? "GSBB" : "PBB";
}

void BootstrapConfig::validate(std::size_t n) const {
    if (period == 0) throw std::invalid_argument("bootstrap period must be positive");
    if (replicates == 0) throw std::invalid_argument("bootstrap replicate count must be positive");
    if (method == Method::GSBB) {
        if (block_length == 0 || block_length > n) {
            throw std::invalid_argument("GSBB block length must lie in [1, n]");
        }
        // S_t is nonempty iff its smallest member t mod d fits a whole block.
        for (std::size_t t = 0; t < n; t += block_length) {
            if (t % period + block_length > n) {
                throw std::invalid_argument("GSBB has no admissible source block for target " + std::to_string(t) +
                                            "; choose a smaller block length or period");
            }
        }
    } else if (period > n) {
        throw std::invalid_argument("PBB period exceeds the series length");
    }
}

PhaseMeans periodic_mean(const series::TimeSeries& series, std::size_t d) {
    if (d == 0) throw std::invalid_argument("periodic_mean: period must be positive");
    std::vector<std::size_t> sources(series.size());
    for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = i;
    PhaseMeans out;
    out.values.assign(d, 0.0);
    std::vector<std::size_t> counts(d);
    accumulate_phase_means(series, sources, out.values, counts);
    out.missing.resize(d);
    for (std::size_t p = 0; p < d; ++p) out.missing[p] = counts[p] == 0;
    return out;
}

std::vector<std::size_t> gsbb_candidates(std::size_t n, std::size_t d, std::size_t b, std::size_t t) {
    if (d == 0) throw std::invalid_argument("GSBB period must be positive");
    if (b == 0 || b > n) throw std::invalid_argument("GSBB block length must lie in [1, n]");
    std::vector<std::size_t> out;
    for (std::size_t u = t % d; u + b <= n; u += d) out.push_back(u);
    return out;
}

std::vector<std::size_t> gsbb_source_indices(std::size_t n, std::size_t d, std::size_t b, rng::Engine& engine) {
    if (d == 0) throw std::invalid_argument("GSBB period must be positive");
    if (b == 0 || b > n) throw std::invalid_argument("GSBB block length must lie in [1, n]");
    std::vector<std::size_t> sources(n);
    for (std::size_t t = 0; t < n; t += b) {
        // Candidates form the progression r, r+d, ... <= n-b with r = t mod d.
        const std::size_t r = t % d;
        if (r + b > n) {
            throw std::invalid_argument("GSBB has no admissible source block for target " + std::to_string(t) +
                                        "; choose a smaller block length or period");
        }
        const std::size_t count = (n - b - r) / d + 1;
        const std::size_t s = r + d * rng::uniform_index(engine, count);
        const std::size_t len = std::min(b, n - t);
        for (std::size_t i = 0; i < len; ++i) sources[t + i] = s + i;
    }
    return sources;
}

std::vector<std::size_t> pbb_source_indices(std::size_t n, std::size_t d, rng::Engine& engine) {
    if (d == 0) throw std::invalid_argument("PBB period must be positive");
    if (d > n) throw std::invalid_argument("PBB period exceeds the series length");
    const std::size_t cycles = n / d;
    std::vector<std::size_t> sources(n);
    for (std::size_t t = 0; t < n; t += d) {
        const std::size_t s = d * rng::uniform_index(engine, cycles);
        const std::size_t len = std::min(d, n - t);
        for (std::size_t i = 0; i < len; ++i) sources[t + i] = s + i;
    }
    return sources;
}

series::TimeSeries gsbb_resample(const series::TimeSeries& series, std::size_t d, std::size_t b, rng::Engine& engine) {
    return gather(series, gsbb_source_indices(series.size(), d, b, engine));
}

series::TimeSeries pbb_resample(const series::TimeSeries& component, std::size_t d, rng::Engine& engine) {
    return gather(component, pbb_source_indices(component.size(), d, engine));
}

ReplicateMatrix bootstrap_replicates(const series::TimeSeries& series, const BootstrapConfig& config) {
    const std::size_t n = series.size();
    config.validate(n);
    ReplicateMatrix matrix;
    matrix.replicates = config.replicates;
    matrix.period = config.period;
    matrix.data.assign(config.replicates * config.period, 0.0);

    parallel_for(config.replicates, config.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> counts(config.period);
        for (std::size_t j = begin; j < end; ++j) {
            auto engine = rng::substream(config.master_seed, config.stream, j);
            const auto sources = config.method == Method::GSBB
                                     ? gsbb_source_indices(n, config.period, config.block_length, engine)
                                     : pbb_source_indices(n, config.period, engine);
            accumulate_phase_means(series, sources, matrix.row(j), counts);
        }
    });
    return matrix;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) return kNaN;
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double BandEstimate::mean_width() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < period; ++p) {
        const double w = upper[p] - lower[p];
        if (std::isnan(w)) continue;
        sum += w;
        ++count;
    }
    return count ? sum / static_cast<double>(count) : kNaN;
}

BandEstimate band_from_replicates(const PhaseMeans& point, const ReplicateMatrix& replicates, series::Date anchor, Method method) {
    if (point.values.size() != replicates.period) throw std::invalid_argument("point estimate and replicates disagree on period");
    const std::size_t d = replicates.period;
    BandEstimate band;
    band.period = d;
    band.point = point.values;
    band.lower.assign(d, kNaN);
    band.upper.assign(d, kNaN);
    band.anchor_date = anchor;
    band.replicates = replicates.replicates;
    band.method = method;

    std::vector<double> column;
    column.reserve(replicates.replicates);
    for (std::size_t p = 0; p < d; ++p) {
        column.clear();
        for (std::size_t j = 0; j < replicates.replicates; ++j) {
            const double v = replicates.data[j * d + p];
            if (!std::isnan(v)) column.push_back(v);
        }
        if (column.empty()) continue;
        std::sort(column.begin(), column.end());
        band.lower[p] = quantile_sorted(column, kLowerQuantile);
        band.upper[p] = quantile_sorted(column, kUpperQuantile);
    }
    return band;
}

BandEstimate bootstrap_band(const series::TimeSeries& series, const BootstrapConfig& config) {
    const auto replicates = bootstrap_replicates(series, config);
    return band_from_replicates(periodic_mean(series, config.period), replicates, series.start_date(), config.method);
}

Significance significance_classify(const BandEstimate& band) {
    Significance out;
    for (std::size_t p = 0; p < band.period; ++p) {
        if (band.lower[p] > 0.0 || band.upper[p] < 0.0) out.excluding_phases.push_back(p);
    }
    out.significant = !out.excluding_phases.empty();
    return out;
}

}  // namespace vbpbb::resample
