#include "oracles.hpp"
#include "vbpbb/resample.hpp"
#include "vbpbb/series.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace vbpbb::series;
using namespace std::chrono;

namespace {

TimeSeries parse(const std::string& text, std::string_view fmt = "%Y-%m-%d") {
    std::istringstream in(text);
    return parse_csv_series(in, {}, fmt);
}

Date ymd(int y, unsigned m, unsigned d) {
    return Date{year{y} / month{m} / day{d}};
}

}  // namespace

TEST_CASE("parse_csv_series maps consecutive rows directly") {
    const auto s = parse("date,value\n2020-03-26,10\n2020-03-27,20\n2020-03-28,30\n");
    REQUIRE(s.size() == 3);
    CHECK(s.start_date() == ymd(2020, 3, 26));
    CHECK(s[0] == 10.0);
    CHECK(s[1] == 20.0);
    CHECK(s[2] == 30.0);
    CHECK(s.missing_count() == 0);
}

TEST_CASE("parse_csv_series fills gaps as missing and accepts any row order") {
    const auto s = parse("value,date\n3,2021-01-03\n1,2021-01-01\n");
    REQUIRE(s.size() == 3);
    CHECK_FALSE(s.is_missing(0));
    CHECK(s.is_missing(1));
    CHECK_FALSE(s.is_missing(2));
    CHECK(s[0] == 1.0);
    CHECK(s[2] == 3.0);
}

TEST_CASE("parse_csv_series handles quotes, custom date formats and empty cells") {
    std::istringstream in("\"As of Date\",\"Patients\"\n\"03/26/2020\",\"1234\"\n03/27/2020,\n3/28/2020,7\n");
    const auto t = parse_csv_series(in, {"As of Date", "Patients"}, "%m/%d/%Y");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == 1234.0);
    CHECK(t.is_missing(1));
    CHECK(t[2] == 7.0);
}

TEST_CASE("parse_csv_series error paths") {
    SUBCASE("unparseable date names the row") {
        try {
            (void)parse("date,value\n2020-01-01,1\n2020-13-01,2\n");
            FAIL("expected an error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        }
    }
    SUBCASE("unparseable value names the row") {
        try {
            (void)parse("date,value\n2020-01-01,abc\n");
            FAIL("expected an error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("row 1") != std::string::npos);
        }
    }
    SUBCASE("conflicting duplicate date") {
        CHECK_THROWS_AS((void)parse("date,value\n2020-01-01,1\n2020-01-01,2\n"), std::invalid_argument);
    }
    SUBCASE("identical duplicate is accepted") {
        CHECK(parse("date,value\n2020-01-01,1\n2020-01-01,1\n").size() == 1);
    }
    SUBCASE("empty table") {
        CHECK_THROWS_AS((void)parse(""), std::invalid_argument);
        CHECK_THROWS_AS((void)parse("date,value\n"), std::invalid_argument);
    }
    SUBCASE("unknown column") {
        CHECK_THROWS_AS((void)parse("day,value\n2020-01-01,1\n"), std::invalid_argument);
    }
}

TEST_CASE("2020-03-26..2023-11-06 spans the inclusive day count") {
    // Three 365-day years plus 225 days from 2023-03-26, counted inclusively.
    const std::size_t expected = oracle::days_inclusive(2020, 3, 26, 2023, 11, 6);
    CHECK(expected == 1321);
    const auto s = parse("date,value\n2023-11-06,5\n2020-03-26,4\n");
    CHECK(s.size() == expected);
    CHECK(s.missing_count() == expected - 2);
}

TEST_CASE("canonical CSV round-trips values and missing mask exactly") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> normal(0.0, 1e3);
    std::bernoulli_distribution drop(0.2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + gen() % 200;
        std::vector<double> values(n);
        std::vector<bool> missing(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = normal(gen);
            missing[i] = drop(gen);
        }
        const TimeSeries original(ymd(2019, 12, 30) + days(trial), values, missing);
        std::ostringstream out;
        write_csv_series(out, original);
        std::istringstream in(out.str());
        CHECK(read_canonical_csv(in) == original);

        // The general parser reads the same export when the first and last days are present.
        if (!missing.front() && !missing.back()) {
            std::istringstream again(out.str());
            CHECK(parse_csv_series(again) == original);
        }
    }
}

TEST_CASE("to_rate converts counts per 1000 population") {
    const TimeSeries one(ymd(2021, 6, 1), {19500.0, 0.0});
    const auto r = to_rate(one, PopulationTable(19'500'000.0));
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r[1] == 0.0);
    CHECK(r.unit() == Unit::RatePer1000);

    // Constant 100 across a year boundary with a two-year table.
    const TimeSeries across(ymd(2020, 12, 30), std::vector<double>(4, 100.0));
    const auto rate = to_rate(across, PopulationTable(5e6, {{2020, 1e6}, {2021, 2e6}}));
    CHECK(rate[0] == doctest::Approx(0.1));
    CHECK(rate[1] == doctest::Approx(0.1));
    CHECK(rate[2] == doctest::Approx(0.05));
    CHECK(rate[3] == doctest::Approx(0.05));

    // Year absent from the table uses the fallback; missing stays missing.
    const TimeSeries later(ymd(2030, 1, 1), {50.0, 1.0}, {false, true});
    const auto fb = to_rate(later, PopulationTable(5e5, {{2020, 1e6}}));
    CHECK(fb[0] == doctest::Approx(0.1));
    CHECK(fb.is_missing(1));
}

TEST_CASE("to_rate is linear in nonnegative scalars") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1e4);
    const PopulationTable pop(7.3e6, {{2020, 1.9e7}, {2021, 2.0e7}});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(400);
        for (auto& x : v) x = u(gen);
        const double a = u(gen) / 1e3;
        std::vector<double> scaled(v);
        for (auto& x : scaled) x *= a;
        const TimeSeries base(ymd(2020, 6, 1), v);
        const auto lhs = to_rate(TimeSeries(ymd(2020, 6, 1), scaled), pop);
        const auto rhs = to_rate(base, pop);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(lhs[i] == doctest::Approx(a * rhs[i]).epsilon(1e-12));
    }
}

TEST_CASE("PopulationTable validation and CSV loading") {
    CHECK_THROWS_AS(PopulationTable(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PopulationTable(1.0, {{2020, -5.0}}), std::invalid_argument);
    std::istringstream in("year,population\n2020,20201249\n2021,19857492\n");
    const auto table = PopulationTable::from_csv(in);
    CHECK(table.population(2020) == 20201249.0);
    CHECK(table.population(2025) == 19857492.0);
}

TEST_CASE("synth_series quarter-period cosine") {
    SynthSpec spec;
    spec.n = 8;
    spec.components = {{4.0, 1.0, 0.0}};
    const auto r = synth_series(spec, 1);
    const double expected[] = {1, 0, -1, 0, 1, 0, -1, 0};
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(r.series[i] - expected[i]) < 1e-12);
}

TEST_CASE("synth_series noiseless truth equals one cycle of the series") {
    SynthSpec spec;
    spec.n = 365 * 3;
    spec.components = {{365.0, 2.0, 0.7}};
    const auto r = synth_series(spec, 9);
    REQUIRE(r.true_periodic_means.size() == 1);
    REQUIRE(r.true_periodic_means[0].size() == 365);
    for (std::size_t p = 0; p < 365; ++p) CHECK(r.true_periodic_means[0][p] == doctest::Approx(r.series[p]).epsilon(1e-12));
}

TEST_CASE("synth_series periodic mean of a sum decomposes over components") {
    SynthSpec spec;
    spec.n = 730;
    spec.components = {{365.0, 1.0, 0.0}, {73.0, 0.5, 1.0}, {10.0, 0.25, -0.3}};
    const auto r = synth_series(spec, 5);
    for (std::size_t j = 0; j < spec.components.size(); ++j) {
        const auto d = r.true_periodic_means[j].size();
        const auto total = vbpbb::resample::periodic_mean(r.series, d);
        std::vector<double> expected = r.true_periodic_means[j];
        for (std::size_t i = 0; i < spec.components.size(); ++i) {
            if (i == j) continue;
            SynthSpec only = spec;
            only.components = {spec.components[i]};
            const auto other = vbpbb::resample::periodic_mean(synth_series(only, 5).series, d);
            for (std::size_t p = 0; p < d; ++p) expected[p] += other.values[p];
        }
        for (std::size_t p = 0; p < d; ++p) CHECK(total.values[p] == doctest::Approx(expected[p]).epsilon(1e-10));
    }
    // lcm(365, 73, 10) = 730: exactly periodic over the whole record.
    SynthSpec longer = spec;
    longer.n = 1460;
    const auto l = synth_series(longer, 5);
    for (std::size_t t = 0; t < 730; ++t) CHECK(std::abs(l.series[t] - l.series[t + 730]) < 1e-9);
}

TEST_CASE("synth_series is deterministic in the seed") {
    SynthSpec spec;
    spec.n = 500;
    spec.components = {{30.0, 1.0, 0.0}};
    spec.noise_sd = 0.7;
    const auto a = synth_series(spec, 42);
    const auto b = synth_series(spec, 42);
    const auto c = synth_series(spec, 43);
    for (std::size_t i = 0; i < spec.n; ++i) CHECK(a.series[i] == b.series[i]);
    CHECK_FALSE(a.series == c.series);
}

TEST_CASE("synth_series AR(1) noise has the requested marginal sd and lag-1 correlation") {
    SynthSpec spec;
    spec.n = 200000;
    spec.noise_sd = 2.0;
    spec.noise_kind = NoiseKind::AR1;
    spec.ar_coefficient = 0.6;
    const auto r = synth_series(spec, 8);
    double m = 0, s2 = 0, c1 = 0;
    for (std::size_t i = 0; i < spec.n; ++i) m += r.series[i];
    m /= spec.n;
    for (std::size_t i = 0; i < spec.n; ++i) s2 += (r.series[i] - m) * (r.series[i] - m);
    for (std::size_t i = 1; i < spec.n; ++i) c1 += (r.series[i] - m) * (r.series[i - 1] - m);
    CHECK(std::sqrt(s2 / spec.n) == doctest::Approx(2.0).epsilon(0.03));
    CHECK(c1 / s2 == doctest::Approx(0.6).epsilon(0.03));
}

TEST_CASE("SynthSpec validation") {
    SynthSpec spec;
    spec.n = 1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.n = 10;
    spec.components = {{1.5, 1.0, 0.0}};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.components = {{2.0, 1.0, 0.0}};
    spec.noise_kind = NoiseKind::AR1;
    spec.ar_coefficient = 1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("TimeSeries invariants") {
    CHECK_THROWS_AS(TimeSeries(ymd(2020, 1, 1), std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries(ymd(2020, 1, 1), {1.0, 2.0}, {false}), std::invalid_argument);
    const TimeSeries s(ymd(2020, 2, 28), {1.0, 2.0, 3.0});
    CHECK(format_date(s.date_at(1)) == "2020-02-29");
    CHECK(format_date(s.date_at(2)) == "2020-03-01");
}
