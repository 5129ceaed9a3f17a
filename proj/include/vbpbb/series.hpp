#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace vbpbb::series {

using Date = std::chrono::sys_days;

enum class Unit { Count, RatePer1000, Dimensionless };

[[nodiscard]] std::string to_string(Unit unit);

/// Formats a date as YYYY-MM-DD.
[[nodiscard]] std::string format_date(Date date);

/**
 * @brief Parses a date using a small strftime-like pattern.
 *
 * Supported directives are %Y (4-digit year), %m and %d (1 or 2 digits) and
 * %% (literal percent). Every other pattern character must match literally.
 * Returns std::nullopt if the text does not match or the date is invalid.
 */
[[nodiscard]] std::optional<Date> parse_date(std::string_view text, std::string_view pattern = "%Y-%m-%d");

/**
 * @brief Uniformly sampled daily series with a per-index missing mask.
 *
 * Index i corresponds to start_date + i days. Missing entries keep a value
 * slot (conventionally NaN) so index arithmetic never has gaps.
 */
class TimeSeries {
public:
    TimeSeries(Date start, std::vector<double> values, std::vector<bool> missing, Unit unit = Unit::Count);
    TimeSeries(Date start, std::vector<double> values, Unit unit = Unit::Count);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] Date start_date() const noexcept { return start_; }
    [[nodiscard]] Date date_at(std::size_t i) const noexcept { return start_ + std::chrono::days(static_cast<long>(i)); }
    [[nodiscard]] Unit unit() const noexcept { return unit_; }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<bool>& missing_mask() const noexcept { return missing_; }

    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] bool is_missing(std::size_t i) const noexcept { return missing_[i]; }
    [[nodiscard]] std::size_t missing_count() const noexcept;

    /// Mean over present values; NaN when every value is missing.
    [[nodiscard]] double mean() const noexcept;

    friend bool operator==(const TimeSeries& a, const TimeSeries& b);

private:
    Date start_;
    std::vector<double> values_;
    std::vector<bool> missing_;
    Unit unit_;
};

struct ColumnMap {
    std::string date_column = "date";
    std::string value_column = "value";
};

/**
 * @brief Reads a header-bearing comma-separated table into a daily series.
 *
 * Rows may arrive in any order. The result spans the earliest to the latest
 * date; dates with no row become missing entries. Empty value cells are read
 * as missing. Quoted fields (RFC 4180) are supported.
 *
 * @throws std::invalid_argument on unknown columns, unparseable dates or
 *         values (message names the 1-based data row), conflicting duplicate
 *         dates, or an empty table.
 */
[[nodiscard]] TimeSeries parse_csv_series(std::istream& in, const ColumnMap& columns = {},
                                          std::string_view date_format = "%Y-%m-%d");

/// Canonical export: `date,value,missing` with missing in {0,1}.
void write_csv_series(std::ostream& out, const TimeSeries& series);

/// Reads the canonical `date,value,missing` export back.
[[nodiscard]] TimeSeries read_canonical_csv(std::istream& in);

/// Per-year population counts with a scalar fallback.
class PopulationTable {
public:
    explicit PopulationTable(double fallback, std::map<int, double> by_year = {});

    [[nodiscard]] double population(int year) const noexcept;
    [[nodiscard]] double fallback() const noexcept { return fallback_; }
    [[nodiscard]] const std::map<int, double>& entries() const noexcept { return by_year_; }

    /// Reads `year,population` rows (header optional). Fallback is the latest year.
    [[nodiscard]] static PopulationTable from_csv(std::istream& in);

private:
    double fallback_;
    std::map<int, double> by_year_;
};

/// Converts a count series into a rate per 1000 population.
[[nodiscard]] TimeSeries to_rate(const TimeSeries& counts, const PopulationTable& population);

enum class NoiseKind { White, AR1 };

struct SynthComponent {
    double period;
    double amplitude;
    double phase;  // radians
};

struct SynthSpec {
    std::size_t n = 0;
    std::vector<SynthComponent> components;
    double noise_sd = 0.0;
    NoiseKind noise_kind = NoiseKind::White;
    double ar_coefficient = 0.0;

    void validate() const;
};

struct SynthResult {
    TimeSeries series;
    /// Noiseless per-phase mean of each component at period round(p).
    std::vector<std::vector<double>> true_periodic_means;
};

/**
 * Generates sum_j A_j cos(2 pi t / p_j + phi_j) + noise for t = 0..n-1.
 * AR(1) noise is scaled so its marginal standard deviation is noise_sd.
 * Output starts at 2000-01-01 and is deterministic in the seed.
 */
[[nodiscard]] SynthResult synth_series(const SynthSpec& spec, std::uint64_t seed);

/// Splits one CSV line into fields, honoring double quotes.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace vbpbb::series
