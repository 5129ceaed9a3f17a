#pragma once

#include "vbpbb/series.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace vbpbb::spectral {

enum class EdgePolicy {
    Renormalize,  ///< partial windows are rescaled over the weights that remain
    Strict        ///< any incomplete window yields a missing output
};

/**
 * @brief Parameters of a Kolmogorov-Zurbenko Fourier transform filter.
 *
 * m is the odd moving-average window, k the number of iterations and nu the
 * center frequency in cycles per day.
 */
struct KzftConfig {
    std::size_t m = 731;
    std::size_t k = 1;
    double nu = 1.0 / 365.0;
    EdgePolicy edge_policy = EdgePolicy::Renormalize;

    /// Total filter span k(m-1)+1.
    [[nodiscard]] std::size_t span() const;
    /// Half span k(m-1)/2.
    [[nodiscard]] std::size_t half_span() const { return (span() - 1) / 2; }
    void validate() const;
};

struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive
    bool empty = true;
};

/**
 * @brief Output of kzft_apply.
 *
 * complex_series is demodulated by absolute time:
 *   z(t) = sum_s w_s X(t+s) exp(-i 2 pi nu (t+s))
 * and the real component is bandpass(t) = 2 Re(z(t) exp(i 2 pi nu t)) for
 * 0 < nu < 0.5, with factor 1 at nu = 0 and nu = 0.5.
 */
struct FilterResult {
    series::Date start_date;
    std::vector<std::complex<double>> complex_series;
    std::vector<double> bandpass;
    std::vector<bool> missing;
    IndexRange valid_core;
    KzftConfig config;
};

/// Coefficients of the k-fold self-convolution of the length-m uniform kernel.
[[nodiscard]] std::vector<double> kzft_coefficients(std::size_t m, std::size_t k);

[[nodiscard]] FilterResult kzft_apply(const series::TimeSeries& series, const KzftConfig& config);

/// The real component series carried by a filter result, with its missing mask.
[[nodiscard]] series::TimeSeries bandpass_component(const FilterResult& result);

/// Remodulation factor: 2 inside (0, 0.5), 1 at the DC and Nyquist ends.
[[nodiscard]] double reconstruction_factor(double nu) noexcept;

struct Periodogram {
    std::vector<double> frequencies;  // j/n, j = 0..floor(n/2)
    std::vector<double> power;
    std::size_t series_length = 0;
    std::size_t imputed_count = 0;  // missing values replaced by the series mean
};

/**
 * @brief Raw periodogram |sum_t (X_t - mean) e^{-i 2 pi j t / n}|^2 / n.
 * @throws std::invalid_argument if n < 2 or every value is missing.
 */
[[nodiscard]] Periodogram periodogram(const series::TimeSeries& series);

struct Peak {
    double frequency;
    double power;
    double period;
};

/**
 * Local maxima of the periodogram (zero frequency excluded), taken greedily by
 * descending power while suppressing anything within min_separation of a peak
 * already chosen.
 */
[[nodiscard]] std::vector<Peak> peak_candidates(const Periodogram& pg, std::size_t top_n, double min_separation);

}  // namespace vbpbb::spectral
