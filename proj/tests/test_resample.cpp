#include "oracles.hpp"
#include "vbpbb/resample.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace vbpbb;
using resample::BootstrapConfig;
using resample::Method;

namespace {

const series::Date kStart{std::chrono::year{2021} / 3 / 1};

series::TimeSeries make(std::vector<double> v) {
    return series::TimeSeries(kStart, std::move(v), series::Unit::Dimensionless);
}

series::TimeSeries tagged(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return make(std::move(v));
}

std::vector<std::size_t> brute_candidates(std::size_t n, std::size_t d, std::size_t b, std::size_t t) {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u + b <= n; ++u)
        if (u % d == t % d) out.push_back(u);
    return out;
}

BootstrapConfig cfg(Method method, std::size_t d, std::size_t replicates, std::uint64_t seed, std::size_t b = 0) {
    BootstrapConfig c;
    c.method = method;
    c.period = d;
    c.block_length = b ? b : d;
    c.replicates = replicates;
    c.master_seed = seed;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("gsbb_candidates match brute-force enumeration") {
    CHECK(resample::gsbb_candidates(8, 4, 4, 0) == std::vector<std::size_t>{0, 4});
    CHECK(resample::gsbb_candidates(8, 4, 4, 4) == std::vector<std::size_t>{0, 4});
    for (std::size_t t : {0u, 3u, 6u, 9u}) {
        CHECK(resample::gsbb_candidates(10, 3, 3, t) == brute_candidates(10, 3, 3, t));
        CHECK(resample::gsbb_candidates(10, 3, 3, t) == std::vector<std::size_t>{0, 3, 6});
    }
    for (std::size_t n = 5; n < 40; n += 3)
        for (std::size_t d = 1; d <= n; d += 2)
            for (std::size_t b = 1; b <= n; b += 3)
                for (std::size_t t = 0; t < n; t += b) CHECK(resample::gsbb_candidates(n, d, b, t) == brute_candidates(n, d, b, t));
}

TEST_CASE("gsbb resample truncates the final block and draws only admissible starts") {
    // n=10, d=3, b=3: targets 0,3,6,9; the block at 9 keeps one value.
    const auto s = tagged(10);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto engine = rng::substream(seed, 0, 0);
        const auto out = resample::gsbb_resample(s, 3, 3, engine);
        REQUIRE(out.size() == 10);
        for (std::size_t t = 0; t < 10; t += 3) {
            const auto start = static_cast<std::size_t>(out[t]);
            CHECK((start == 0 || start == 3 || start == 6));
            for (std::size_t i = t; i < std::min<std::size_t>(t + 3, 10); ++i) CHECK(out[i] == static_cast<double>(start + i - t));
        }
    }
}

TEST_CASE("gsbb errors when some target has no admissible block") {
    auto engine = rng::substream(1, 0, 0);
    // n=10, b=8, d=5: target 8 needs u = 3 (mod 5) with u <= 2.
    CHECK_THROWS_AS((void)resample::gsbb_resample(tagged(10), 5, 8, engine), std::invalid_argument);
    CHECK_THROWS_AS(cfg(Method::GSBB, 5, 10, 1, 8).validate(10), std::invalid_argument);
    CHECK_THROWS_AS((void)resample::gsbb_resample(tagged(10), 5, 11, engine), std::invalid_argument);
    CHECK_THROWS_AS((void)resample::gsbb_resample(tagged(10), 0, 2, engine), std::invalid_argument);
    CHECK_NOTHROW(cfg(Method::GSBB, 5, 10, 1, 5).validate(10));
}

TEST_CASE("exactly periodic series is reproduced by GSBB with b = d and by PBB") {
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(static_cast<double>(i % 8));
    const auto s = make(v);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto e1 = rng::substream(seed, 0, 0);
        CHECK(resample::gsbb_resample(s, 8, 8, e1) == s);
        auto e2 = rng::substream(seed, 0, 1);
        CHECK(resample::pbb_resample(s, 8, e2) == s);
    }
}

TEST_CASE("pbb n=10, d=5 yields the four cycle sequences with equal frequency") {
    std::map<std::vector<std::size_t>, int> seen;
    const int trials = 4000;
    for (int j = 0; j < trials; ++j) {
        auto engine = rng::substream(99, 0, static_cast<std::uint64_t>(j));
        ++seen[resample::pbb_source_indices(10, 5, engine)];
    }
    CHECK(seen.size() == 4);
    for (const auto& [idx, count] : seen) {
        CHECK(std::abs(count - trials / 4) < 4 * std::sqrt(trials * 0.25 * 0.75));
        for (std::size_t i = 0; i < 10; ++i) CHECK(idx[i] % 5 == i % 5);
    }
}

TEST_CASE("pbb n=11, d=5 enumerates exactly the 8 outcomes") {
    std::set<std::vector<std::size_t>> expected;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c) {
                std::vector<std::size_t> idx;
                for (std::size_t i = 0; i < 5; ++i) idx.push_back(5 * a + i);
                for (std::size_t i = 0; i < 5; ++i) idx.push_back(5 * b + i);
                idx.push_back(5 * c);
                expected.insert(idx);
            }
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t j = 0; j < 500; ++j) {
        auto engine = rng::substream(5, 2, j);
        const auto idx = resample::pbb_source_indices(11, 5, engine);
        REQUIRE(idx.size() == 11);
        CHECK(expected.count(idx) == 1);
        seen.insert(idx);
    }
    CHECK(seen == expected);
}

TEST_CASE("pbb rejects a period longer than the series") {
    auto engine = rng::substream(1, 0, 0);
    CHECK_THROWS_AS((void)resample::pbb_resample(tagged(4), 5, engine), std::invalid_argument);
    CHECK_THROWS_AS(cfg(Method::PBB, 5, 10, 1).validate(4), std::invalid_argument);
}

TEST_CASE("phase laws on an index-tagged series") {
    const std::size_t n = 1000;
    const auto s = tagged(n);
    for (std::size_t d : {7u, 30u, 365u}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto e1 = rng::substream(seed, 1, d);
            const auto g = resample::gsbb_resample(s, d, d, e1);
            auto e2 = rng::substream(seed, 2, d);
            const auto p = resample::pbb_resample(s, d, e2);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(static_cast<std::size_t>(g[i]) % d == i % d);
                CHECK(static_cast<std::size_t>(p[i]) % d == i % d);
            }
        }
    }
}

TEST_CASE("periodic_mean examples") {
    auto pm = resample::periodic_mean(make({1, 2, 3, 1, 2, 3}), 3);
    CHECK(pm.values == std::vector<double>{1, 2, 3});
    pm = resample::periodic_mean(make({1, 2, 3, 1}), 3);
    CHECK(pm.values == std::vector<double>{1, 2, 3});

    std::mt19937_64 gen(1);
    std::normal_distribution<double> normal;
    std::vector<double> v(77);
    double sum = 0.0;
    for (auto& x : v) sum += (x = normal(gen));
    pm = resample::periodic_mean(make(v), 1);
    REQUIRE(pm.values.size() == 1);
    CHECK(pm.values[0] == doctest::Approx(sum / 77).epsilon(1e-12));

    const series::TimeSeries holes(kStart, {1, 2, 3, 4}, {false, true, false, true});
    pm = resample::periodic_mean(holes, 2);
    CHECK(pm.values[0] == 2.0);
    CHECK(pm.missing[1]);
    CHECK(std::isnan(pm.values[1]));
    CHECK_THROWS_AS((void)resample::periodic_mean(holes, 0), std::invalid_argument);
}

TEST_CASE("quantile_sorted uses linear interpolation between order statistics") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(resample::quantile_sorted(x, 0.025) == doctest::Approx(1.075));
    CHECK(resample::quantile_sorted(x, 0.975) == doctest::Approx(3.925));
    CHECK(resample::quantile_sorted(x, 0.0) == 1.0);
    CHECK(resample::quantile_sorted(x, 1.0) == 4.0);
    CHECK(resample::quantile_sorted(std::vector<double>{7.5}, 0.3) == 7.5);
}

TEST_CASE("bootstrap_band degenerate cases") {
    std::vector<double> v(365 * 4);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(2 * oracle::kPi * static_cast<double>(i) / 365.0);
    const auto s = make(v);
    for (auto method : {Method::PBB, Method::GSBB}) {
        const auto band = resample::bootstrap_band(s, cfg(method, 365, 50, 3));
        for (std::size_t p = 0; p < 365; ++p) {
            CHECK(std::abs(band.upper[p] - band.lower[p]) <= 1e-12);
            CHECK(std::abs(band.point[p] - band.lower[p]) <= 1e-12);
        }
    }

    std::mt19937_64 gen(2);
    std::normal_distribution<double> normal;
    std::vector<double> noise(100);
    for (auto& x : noise) x = normal(gen);
    const auto ns = make(noise);
    const auto c = cfg(Method::PBB, 10, 1, 77);
    const auto band = resample::bootstrap_band(ns, c);
    const auto single = resample::bootstrap_replicates(ns, c);
    for (std::size_t p = 0; p < 10; ++p) {
        CHECK(band.lower[p] == single.row(0)[p]);
        CHECK(band.upper[p] == single.row(0)[p]);
    }
}

TEST_CASE("bootstrap results are bit-identical across thread counts and runs") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> normal;
    std::vector<double> v(900);
    for (auto& x : v) x = normal(gen);
    const auto s = make(v);
    for (auto method : {Method::PBB, Method::GSBB}) {
        auto c = cfg(method, 73, 301, 12345, method == Method::GSBB ? 40 : 0);
        c.threads = 1;
        const auto a = resample::bootstrap_replicates(s, c);
        c.threads = 4;
        const auto b = resample::bootstrap_replicates(s, c);
        c.threads = 7;
        const auto d = resample::bootstrap_replicates(s, c);
        CHECK(a.data == b.data);
        CHECK(a.data == d.data);
        const auto band1 = resample::bootstrap_band(s, c);
        const auto band2 = resample::bootstrap_band(s, c);
        CHECK(band1.lower == band2.lower);
        CHECK(band1.upper == band2.upper);
    }
}

TEST_CASE("quantile sandwich: min <= lower <= upper <= max per phase") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(200 + 17 * trial);
        for (auto& x : v) x = normal(gen) * (1 + trial);
        const auto s = make(v);
        for (auto method : {Method::PBB, Method::GSBB}) {
            const auto c = cfg(method, 12, 97, static_cast<std::uint64_t>(trial), method == Method::GSBB ? 9 : 0);
            const auto reps = resample::bootstrap_replicates(s, c);
            const auto band = resample::band_from_replicates(resample::periodic_mean(s, 12), reps, kStart, method);
            for (std::size_t p = 0; p < 12; ++p) {
                double lo = INFINITY, hi = -INFINITY;
                for (std::size_t j = 0; j < reps.replicates; ++j) {
                    lo = std::min(lo, reps.row(j)[p]);
                    hi = std::max(hi, reps.row(j)[p]);
                }
                CHECK(lo <= band.lower[p]);
                CHECK(band.lower[p] <= band.upper[p]);
                CHECK(band.upper[p] <= hi);
            }
        }
    }
}

TEST_CASE("PBB preserves the full-cycle grand mean in expectation") {
    std::mt19937_64 gen(44);
    std::normal_distribution<double> normal(3.0, 2.0);
    const std::size_t d = 25, n = 8 * d;
    std::vector<double> v(n);
    for (auto& x : v) x = normal(gen);
    const auto s = make(v);
    double target = 0.0;
    for (double x : v) target += x;
    target /= n;

    const auto reps = resample::bootstrap_replicates(s, cfg(Method::PBB, d, 4000, 9));
    std::vector<double> grand(reps.replicates);
    for (std::size_t j = 0; j < reps.replicates; ++j) {
        double sum = 0.0;
        for (double x : reps.row(j)) sum += x;
        grand[j] = sum / d;
    }
    double mean = 0.0, var = 0.0;
    for (double g : grand) mean += g;
    mean /= grand.size();
    for (double g : grand) var += (g - mean) * (g - mean);
    var /= grand.size() - 1;
    CHECK(std::abs(mean - target) <= 3.0 * std::sqrt(var / grand.size()));
}

TEST_CASE("significance_classify") {
    resample::BandEstimate band;
    band.period = 4;
    band.point = {0.5, 0.5, 0.5, 0.5};
    band.lower = std::vector<double>(4, 0.1);
    band.upper = std::vector<double>(4, 1.0);
    auto sig = resample::significance_classify(band);
    CHECK(sig.significant);
    CHECK(sig.excluding_phases == std::vector<std::size_t>{0, 1, 2, 3});

    band.lower = std::vector<double>(4, -1.0);
    band.upper = std::vector<double>(4, 1.0);
    sig = resample::significance_classify(band);
    CHECK_FALSE(sig.significant);
    CHECK(sig.excluding_phases.empty());

    band.upper[2] = -0.2;
    band.lower[2] = -0.5;
    sig = resample::significance_classify(band);
    CHECK(sig.significant);
    CHECK(sig.excluding_phases == std::vector<std::size_t>{2});
}

TEST_CASE("BootstrapConfig validation") {
    CHECK_THROWS_AS(cfg(Method::PBB, 0, 10, 1).validate(10), std::invalid_argument);
    CHECK_THROWS_AS(cfg(Method::PBB, 5, 0, 1).validate(10), std::invalid_argument);
}
