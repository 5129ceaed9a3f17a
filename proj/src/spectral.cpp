#include "vbpbb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vbpbb::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-i 2 pi nu t), reduced modulo one cycle before scaling so large t keeps precision.
std::complex<double> demodulator(double nu, std::size_t t) {
    const double cycles = std::fmod(nu * static_cast<double>(t), 1.0);
    return std::polar(1.0, -kTwoPi * cycles);
}

}  // namespace

std::size_t KzftConfig::span() const {
    if (m == 0 || k == 0) throw std::invalid_argument("KZFT: m and k must be positive");
    if (k > (std::numeric_limits<std::size_t>::max() - 1) / std::max<std::size_t>(m - 1, 1)) {
        throw std::overflow_error("KZFT: span k(m-1)+1 overflows");
    }
    return k * (m - 1) + 1;
}

void KzftConfig::validate() const {
    if (m == 0 || m % 2 == 0) throw std::invalid_argument("KZFT: window m must be a positive odd integer");
    if (k == 0) throw std::invalid_argument("KZFT: iteration count k must be positive");
    if (!(nu >= 0.0 && nu <= 0.5)) throw std::invalid_argument("KZFT: center frequency must lie in [0, 0.5]");
    (void)span();
}

std::vector<double> kzft_coefficients(std::size_t m, std::size_t k) {
    KzftConfig cfg;
    cfg.m = m;
    cfg.k = k;
    cfg.nu = 0.0;
    cfg.validate();

    // Convolve integer counts (exact while below 2^53) and scale by m^-k once.
    std::vector<double> coefs(m, 1.0);
    for (std::size_t iter = 1; iter < k; ++iter) {
        std::vector<double> next(coefs.size() + m - 1, 0.0);
        for (std::size_t i = 0; i < coefs.size(); ++i) {
            for (std::size_t j = 0; j < m; ++j) next[i + j] += coefs[i];
        }
        coefs = std::move(next);
    }
    const double scale = std::pow(static_cast<double>(m), -static_cast<double>(k));
    const std::size_t len = coefs.size();
    for (std::size_t i = 0; i <= len / 2; ++i) {
        const double w = 0.5 * (coefs[i] + coefs[len - 1 - i]) * scale;
        coefs[i] = w;
        coefs[len - 1 - i] = w;
    }
    return coefs;
}

double reconstruction_factor(double nu) noexcept {
    return (nu > 0.0 && nu < 0.5) ? 2.0 : 1.0;
}

FilterResult kzft_apply(const series::TimeSeries& series, const KzftConfig& config) {
    config.validate();
    const auto weights = kzft_coefficients(config.m, config.k);
    const std::size_t n = series.size();
    const auto half = static_cast<std::ptrdiff_t>(config.half_span());

    std::vector<std::complex<double>> demod(n);
    for (std::size_t t = 0; t < n; ++t) demod[t] = demodulator(config.nu, t);

    FilterResult result;
    result.start_date = series.start_date();
    result.config = config;
    result.complex_series.assign(n, {0.0, 0.0});
    result.bandpass.assign(n, std::numeric_limits<double>::quiet_NaN());
    result.missing.assign(n, false);

    const auto values = series.values();
    for (std::size_t t = 0; t < n; ++t) {
        std::complex<double> acc{0.0, 0.0};
        double weight_sum = 0.0;
        bool complete = true;
        for (std::ptrdiff_t s = -half; s <= half; ++s) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) + s;
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n) || series.is_missing(static_cast<std::size_t>(idx))) {
                complete = false;
                continue;
            }
            const double w = weights[static_cast<std::size_t>(s + half)];
            acc += w * values[static_cast<std::size_t>(idx)] * demod[static_cast<std::size_t>(idx)];
            weight_sum += w;
        }
        bool is_missing = false;
        if (config.edge_policy == EdgePolicy::Strict) {
            is_missing = !complete;
        } else if (weight_sum <= 0.0) {
            is_missing = true;
        } else if (!complete) {
            acc /= weight_sum;
        }
        if (is_missing) {
            result.missing[t] = true;
            result.complex_series[t] = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
            continue;
        }
        result.complex_series[t] = acc;
        // z * exp(+i 2 pi nu t) == z * conj(demod)
        result.bandpass[t] = reconstruction_factor(config.nu) * (acc * std::conj(demod[t])).real();
    }

    const std::size_t span = config.span();
    if (span <= n) {
        result.valid_core = {static_cast<std::size_t>(half), n - 1 - static_cast<std::size_t>(half), false};
    }
    return result;
}

series::TimeSeries bandpass_component(const FilterResult& result) {
    return series::TimeSeries(result.start_date, result.bandpass, result.missing, series::Unit::Dimensionless);
}

Periodogram periodogram(const series::TimeSeries& series) {
    const std::size_t n = series.size();
    if (n < 2) throw std::invalid_argument("periodogram: series needs at least 2 values");
    const double mean = series.mean();
    if (std::isnan(mean)) throw std::invalid_argument("periodogram: every value is missing");

    std::vector<double> centered(n);
    Periodogram pg;
    pg.series_length = n;
    for (std::size_t t = 0; t < n; ++t) {
        if (series.is_missing(t)) {
            centered[t] = 0.0;
            ++pg.imputed_count;
        } else {
            centered[t] = series[t] - mean;
        }
    }

    // Twiddles indexed by (j*t) mod n keep every angle exact to one rounding.
    std::vector<std::complex<double>> twiddle(n);
    for (std::size_t r = 0; r < n; ++r) {
        twiddle[r] = std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(n));
    }

    const std::size_t bins = n / 2 + 1;
    pg.frequencies.resize(bins);
    pg.power.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        std::complex<double> acc{0.0, 0.0};
        std::size_t r = 0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += centered[t] * twiddle[r];
            r += j;
            if (r >= n) r -= n;
        }
        pg.frequencies[j] = static_cast<double>(j) / static_cast<double>(n);
        pg.power[j] = j == 0 ? 0.0 : std::norm(acc) / static_cast<double>(n);
    }
    return pg;
}

std::vector<Peak> peak_candidates(const Periodogram& pg, std::size_t top_n, double min_separation) {
    if (top_n == 0) throw std::invalid_argument("peak_candidates: top_n must be positive");
    const std::size_t bins = pg.power.size();
    std::vector<std::size_t> maxima;
    for (std::size_t j = 1; j < bins; ++j) {
        const double p = pg.power[j];
        if (!(p > 0.0)) continue;
        const bool left_ok = pg.power[j - 1] <= p;
        const bool right_ok = j + 1 >= bins || pg.power[j + 1] <= p;
        if (left_ok && right_ok) maxima.push_back(j);
    }
    std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return pg.power[a] > pg.power[b]; });

    std::vector<Peak> peaks;
    for (const std::size_t j : maxima) {
        if (peaks.size() == top_n) break;
        const double f = pg.frequencies[j];
        const bool suppressed = std::any_of(peaks.begin(), peaks.end(),
                                            [&](const Peak& p) { return std::abs(p.frequency - f) < min_separation; });
        if (!suppressed) peaks.push_back({f, pg.power[j], 1.0 / f});
    }
    return peaks;
}

}  // namespace vbpbb::spectral
