#include "vbpbb/series.hpp"

#include "vbpbb/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vbpbb::series {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

bool read_digits(std::string_view text, std::size_t& pos, int min_digits, int max_digits, int& out) {
    int count = 0;
    int value = 0;
    while (pos < text.size() && count < max_digits && text[pos] >= '0' && text[pos] <= '9') {
        value = value * 10 + (text[pos] - '0');
        ++pos;
        ++count;
    }
    out = value;
    return count >= min_digits;
}

bool getline_stripped(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

std::string to_string(Unit unit) {
    switch (unit) {
        case Unit::Count: return "count";
        case Unit::RatePer1000: return "rate-per-1000";
        case Unit::Dimensionless: return "dimensionless";
    }
    return "unknown";
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<Date> parse_date(std::string_view text, std::string_view pattern) {
    text = trim(text);
    int year = -1, month = -1, day = -1;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const char c = pattern[i];
        if (c == '%' && i + 1 < pattern.size()) {
            const char directive = pattern[++i];
            bool ok = true;
            switch (directive) {
                case 'Y': ok = read_digits(text, pos, 4, 4, year); break;
                case 'm': ok = read_digits(text, pos, 1, 2, month); break;
                case 'd': ok = read_digits(text, pos, 1, 2, day); break;
                case '%': ok = pos < text.size() && text[pos++] == '%'; break;
                default: throw std::invalid_argument("unsupported date directive %" + std::string(1, directive));
            }
            if (!ok) return std::nullopt;
        } else {
            if (pos >= text.size() || text[pos] != c) return std::nullopt;
            ++pos;
        }
    }
    if (pos != text.size() || year < 0 || month < 0 || day < 0) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

// ----------------------------------------------------------------- TimeSeries

TimeSeries::TimeSeries(Date start, std::vector<double> values, std::vector<bool> missing, Unit unit)
    : start_(start), values_(std::move(values)), missing_(std::move(missing)), unit_(unit) {
    if (values_.empty()) throw std::invalid_argument("TimeSeries: series must have at least one value");
    if (values_.size() != missing_.size()) throw std::invalid_argument("TimeSeries: values and missing mask differ in length");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (missing_[i]) values_[i] = kNaN;
        else if (!std::isfinite(values_[i])) missing_[i] = true;
    }
}

TimeSeries::TimeSeries(Date start, std::vector<double> values, Unit unit)
    : TimeSeries(start, values, std::vector<bool>(values.size(), false), unit) {}

std::size_t TimeSeries::missing_count() const noexcept {
    return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), true));
}

double TimeSeries::mean() const noexcept {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (missing_[i]) continue;
        sum += values_[i];
        ++count;
    }
    return count == 0 ? kNaN : sum / static_cast<double>(count);
}

bool operator==(const TimeSeries& a, const TimeSeries& b) {
    if (a.start_ != b.start_ || a.unit_ != b.unit_ || a.missing_ != b.missing_ || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a.missing_[i] && a.values_[i] != b.values_[i]) return false;
    }
    return true;
}

// ------------------------------------------------------------------ CSV input

TimeSeries parse_csv_series(std::istream& in, const ColumnMap& columns, std::string_view date_format) {
    std::string line;
    if (!getline_stripped(in, line)) throw std::invalid_argument("CSV input is empty");
    // Strip a UTF-8 byte order mark.
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_csv_line(line);
    auto find_column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw std::invalid_argument("CSV header has no column named '" + name + "'");
    };
    const std::size_t date_idx = find_column(columns.date_column);
    const std::size_t value_idx = find_column(columns.value_column);

    std::map<Date, double> rows;  // NaN marks an explicitly empty value
    std::size_t row_number = 0;
    while (getline_stripped(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max(date_idx, value_idx)) {
            throw std::invalid_argument("row " + std::to_string(row_number) + ": too few fields");
        }
        const auto date = parse_date(fields[date_idx], date_format);
        if (!date) {
            throw std::invalid_argument("row " + std::to_string(row_number) + ": cannot parse date '" + fields[date_idx] + "'");
        }
        double value = kNaN;
        if (!trim(fields[value_idx]).empty()) {
            const auto parsed = parse_double(fields[value_idx]);
            if (!parsed || !std::isfinite(*parsed)) {
                throw std::invalid_argument("row " + std::to_string(row_number) + ": cannot parse value '" + fields[value_idx] + "'");
            }
            value = *parsed;
        }
        const auto [it, inserted] = rows.emplace(*date, value);
        if (!inserted) {
            const bool same = (std::isnan(it->second) && std::isnan(value)) || it->second == value;
            if (!same) {
                throw std::invalid_argument("row " + std::to_string(row_number) + ": duplicate date " + format_date(*date) +
                                            " with conflicting values");
            }
        }
    }
    if (rows.empty()) throw std::invalid_argument("CSV table has no data rows");

    const Date first = rows.begin()->first;
    const Date last = rows.rbegin()->first;
    const auto n = static_cast<std::size_t>((last - first).count()) + 1;
    std::vector<double> values(n, kNaN);
    std::vector<bool> missing(n, true);
    for (const auto& [date, value] : rows) {
        const auto i = static_cast<std::size_t>((date - first).count());
        if (!std::isnan(value)) {
            values[i] = value;
            missing[i] = false;
        }
    }
    return TimeSeries(first, std::move(values), std::move(missing), Unit::Count);
}

void write_csv_series(std::ostream& out, const TimeSeries& series) {
    out << "date,value,missing\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_date(series.date_at(i)) << ',';
        if (series.is_missing(i)) {
            out << ",1\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", series[i]);
            out << buf << ",0\n";
        }
    }
}

TimeSeries read_canonical_csv(std::istream& in) {
    std::string line;
    if (!getline_stripped(in, line)) throw std::invalid_argument("CSV input is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "date" || header[1] != "value" || header[2] != "missing") {
        throw std::invalid_argument("expected canonical header 'date,value,missing'");
    }
    std::optional<Date> start;
    std::vector<double> values;
    std::vector<bool> missing;
    std::size_t row_number = 0;
    while (getline_stripped(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 3) throw std::invalid_argument("row " + std::to_string(row_number) + ": too few fields");
        const auto date = parse_date(fields[0]);
        if (!date) throw std::invalid_argument("row " + std::to_string(row_number) + ": cannot parse date");
        if (!start) start = date;
        if (*date != *start + std::chrono::days(static_cast<long>(values.size()))) {
            throw std::invalid_argument("row " + std::to_string(row_number) + ": canonical series must be gap-free");
        }
        const bool is_missing = trim(fields[2]) == "1";
        double value = kNaN;
        if (!is_missing) {
            const auto parsed = parse_double(fields[1]);
            if (!parsed) throw std::invalid_argument("row " + std::to_string(row_number) + ": cannot parse value");
            value = *parsed;
        }
        values.push_back(value);
        missing.push_back(is_missing);
    }
    if (!start) throw std::invalid_argument("CSV table has no data rows");
    return TimeSeries(*start, std::move(values), std::move(missing), Unit::Count);
}

// ----------------------------------------------------------------- Population

PopulationTable::PopulationTable(double fallback, std::map<int, double> by_year)
    : fallback_(fallback), by_year_(std::move(by_year)) {
    if (!(fallback_ > 0.0)) throw std::invalid_argument("population fallback must be positive");
    for (const auto& [year, count] : by_year_) {
        if (!(count > 0.0)) throw std::invalid_argument("population for year " + std::to_string(year) + " must be positive");
    }
}

double PopulationTable::population(int year) const noexcept {
    const auto it = by_year_.find(year);
    return it == by_year_.end() ? fallback_ : it->second;
}

PopulationTable PopulationTable::from_csv(std::istream& in) {
    std::map<int, double> entries;
    std::string line;
    std::size_t row_number = 0;
    while (getline_stripped(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2) throw std::invalid_argument("population row " + std::to_string(row_number) + ": expected year,population");
        const auto year = parse_double(fields[0]);
        const auto count = parse_double(fields[1]);
        if (!year || !count) {
            if (row_number == 1) continue;  // header
            throw std::invalid_argument("population row " + std::to_string(row_number) + ": cannot parse");
        }
        entries[static_cast<int>(*year)] = *count;
    }
    if (entries.empty()) throw std::invalid_argument("population table is empty");
    const double fallback = entries.rbegin()->second;
    return PopulationTable(fallback, std::move(entries));
}

TimeSeries to_rate(const TimeSeries& counts, const PopulationTable& population) {
    std::vector<double> values(counts.values().begin(), counts.values().end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (counts.is_missing(i)) continue;
        const std::chrono::year_month_day ymd{counts.date_at(i)};
        values[i] = values[i] / population.population(static_cast<int>(ymd.year())) * 1000.0;
    }
    return TimeSeries(counts.start_date(), std::move(values), counts.missing_mask(), Unit::RatePer1000);
}

// ------------------------------------------------------------------ Synthesis

void SynthSpec::validate() const {
    if (n < 2) throw std::invalid_argument("synthetic series needs n >= 2");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be non-negative");
    if (noise_kind == NoiseKind::AR1 && !(ar_coefficient > -1.0 && ar_coefficient < 1.0)) {
        throw std::invalid_argument("AR(1) coefficient must lie in (-1, 1)");
    }
    for (const auto& c : components) {
        if (!(c.period >= 2.0)) throw std::invalid_argument("component period must be >= 2");
    }
}

SynthResult synth_series(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> values(spec.n, 0.0);
    std::vector<std::vector<double>> truths;
    for (const auto& c : spec.components) {
        const auto d = static_cast<std::size_t>(std::llround(c.period));
        std::vector<double> sums(d, 0.0);
        std::vector<std::size_t> counts(d, 0);
        for (std::size_t t = 0; t < spec.n; ++t) {
            const double v = c.amplitude * std::cos(two_pi * static_cast<double>(t) / c.period + c.phase);
            values[t] += v;
            sums[t % d] += v;
            ++counts[t % d];
        }
        for (std::size_t p = 0; p < d; ++p) sums[p] = counts[p] ? sums[p] / static_cast<double>(counts[p]) : kNaN;
        truths.push_back(std::move(sums));
    }
    if (spec.noise_sd > 0.0) {
        auto engine = rng::substream(seed, 0, 0);
        std::normal_distribution<double> normal(0.0, 1.0);
        if (spec.noise_kind == NoiseKind::White) {
            for (auto& v : values) v += spec.noise_sd * normal(engine);
        } else {
            const double phi = spec.ar_coefficient;
            const double innovation_sd = spec.noise_sd * std::sqrt(1.0 - phi * phi);
            double state = spec.noise_sd * normal(engine);
            for (auto& v : values) {
                v += state;
                state = phi * state + innovation_sd * normal(engine);
            }
        }
    }
    const Date start{std::chrono::year{2000} / std::chrono::January / 1};
    return SynthResult{TimeSeries(start, std::move(values), Unit::Dimensionless), std::move(truths)};
}

}  // namespace vbpbb::series
