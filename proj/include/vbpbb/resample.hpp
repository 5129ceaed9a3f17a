#pragma once

#include "vbpbb/rng.hpp"
#include "vbpbb/series.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vbpbb::resample {

enum class Method {
    GSBB,  ///< generalized seasonal block bootstrap over the raw series
    PBB    ///< whole-cycle, phase-aligned period block bootstrap
};

[[nodiscard]] std::string to_string(Method method);

struct BootstrapConfig {
    Method method = Method::PBB;
    std::size_t period = 365;
    std::size_t block_length = 365;  ///< ignored for PBB, which always uses the period
    std::size_t replicates = 10000;
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;   ///< separates independent replicate families under one seed
    std::size_t threads = 0;    ///< 0 selects hardware concurrency; never affects results

    /// @throws std::invalid_argument when the config cannot run on a series of length n
    void validate(std::size_t n) const;
};

/// Per-phase means; a phase with no present values is flagged missing (value NaN).
struct PhaseMeans {
    std::vector<double> values;
    std::vector<bool> missing;
};

/// Mean of the present values at indices congruent to each phase mod d.
[[nodiscard]] PhaseMeans periodic_mean(const series::TimeSeries& series, std::size_t d);

/**
 * @brief Admissible GSBB source starts for the block that begins at target t.
 *
 * S_t = { u in [0, n-b] : u = t (mod d) }.
 */
[[nodiscard]] std::vector<std::size_t> gsbb_candidates(std::size_t n, std::size_t d, std::size_t b, std::size_t t);

/**
 * @brief Source index of every output position for one GSBB resample.
 * @throws std::invalid_argument if b is outside [1, n], d is zero, or some S_t is empty.
 */
[[nodiscard]] std::vector<std::size_t> gsbb_source_indices(std::size_t n, std::size_t d, std::size_t b, rng::Engine& engine);

/**
 * @brief Source index of every output position for one period-block resample.
 *
 * Draws floor(n/d) full cycles (plus one truncated cycle when n mod d > 0)
 * uniformly with replacement from the full cycles of the input.
 * @throws std::invalid_argument if d is zero or d > n.
 */
[[nodiscard]] std::vector<std::size_t> pbb_source_indices(std::size_t n, std::size_t d, rng::Engine& engine);

[[nodiscard]] series::TimeSeries gsbb_resample(const series::TimeSeries& series, std::size_t d, std::size_t b, rng::Engine& engine);
[[nodiscard]] series::TimeSeries pbb_resample(const series::TimeSeries& component, std::size_t d, rng::Engine& engine);

/// Row-major B x d matrix of replicate periodic means. NaN marks a phase with no data.
struct ReplicateMatrix {
    std::size_t replicates = 0;
    std::size_t period = 0;
    std::vector<double> data;

    [[nodiscard]] std::span<const double> row(std::size_t j) const { return {data.data() + j * period, period}; }
    [[nodiscard]] std::span<double> row(std::size_t j) { return {data.data() + j * period, period}; }
};

/**
 * Runs config.replicates resamples and records the periodic mean of each.
 * Replicate j always draws from rng::substream(master_seed, stream, j).
 */
[[nodiscard]] ReplicateMatrix bootstrap_replicates(const series::TimeSeries& series, const BootstrapConfig& config);

/// Linear interpolation between order statistics of an ascending sample (R type 7).
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);

struct BandEstimate {
    std::size_t period = 0;
    std::vector<double> point;
    std::vector<double> lower;
    std::vector<double> upper;
    series::Date anchor_date;
    std::size_t replicates = 0;
    Method method = Method::PBB;

    [[nodiscard]] double mean_width() const;
};

inline constexpr double kLowerQuantile = 0.025;
inline constexpr double kUpperQuantile = 0.975;

/// Per-phase 2.5%/97.5% quantiles of the replicates around the given point estimate.
[[nodiscard]] BandEstimate band_from_replicates(const PhaseMeans& point, const ReplicateMatrix& replicates,
                                                series::Date anchor, Method method);

/// Point estimate is the periodic mean of the input; the band comes from the bootstrap.
[[nodiscard]] BandEstimate bootstrap_band(const series::TimeSeries& series, const BootstrapConfig& config);

struct Significance {
    bool significant = false;
    std::vector<std::size_t> excluding_phases;
};

/// A phase excludes zero iff lower > 0 or upper < 0; the band is significant if any phase does.
[[nodiscard]] Significance significance_classify(const BandEstimate& band);

}  // namespace vbpbb::resample
