#include "vbpbb/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace vbpbb::io {

namespace {

constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string month_label(series::Date date) {
    const std::chrono::year_month_day ymd{date};
    return kMonths[static_cast<unsigned>(ymd.month()) - 1];
}

nlohmann::json nullable(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json nullable(const std::vector<double>& values) {
    auto arr = nlohmann::json::array();
    for (const double v : values) arr.push_back(nullable(v));
    return arr;
}

void write_band_rows(std::ostream& out, const std::string& method, const std::string& component, const std::string& label,
                     const resample::BandEstimate& band) {
    for (std::size_t p = 0; p < band.period; ++p) {
        const auto date = band.anchor_date + std::chrono::days(static_cast<long>(p));
        out << method << ',' << component << ",\"" << label << "\"," << band.period << ',' << p << ',' << series::format_date(date)
            << ',' << month_label(date) << ',' << format_number(band.point[p]) << ',' << format_number(band.lower[p]) << ','
            << format_number(band.upper[p]) << '\n';
    }
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_filter_csv(std::ostream& out, const spectral::FilterResult& result) {
    out << "date,re,im,bandpass,missing\n";
    for (std::size_t t = 0; t < result.complex_series.size(); ++t) {
        const auto date = result.start_date + std::chrono::days(static_cast<long>(t));
        out << series::format_date(date) << ',';
        if (result.missing[t]) {
            out << ",,,1\n";
            continue;
        }
        out << format_number(result.complex_series[t].real()) << ',' << format_number(result.complex_series[t].imag()) << ','
            << format_number(result.bandpass[t]) << ",0\n";
    }
}

void write_periodogram_csv(std::ostream& out, const spectral::Periodogram& pg) {
    out << "frequency,period_days,power\n";
    for (std::size_t j = 0; j < pg.frequencies.size(); ++j) {
        const double f = pg.frequencies[j];
        out << format_number(f) << ',' << (f > 0.0 ? format_number(1.0 / f) : std::string("inf")) << ',' << format_number(pg.power[j])
            << '\n';
    }
}

void write_band_csv(std::ostream& out, const resample::BandEstimate& band) {
    out << "phase,date_of_first_occurrence,point,lower,upper\n";
    for (std::size_t p = 0; p < band.period; ++p) {
        const auto date = band.anchor_date + std::chrono::days(static_cast<long>(p));
        out << p << ',' << series::format_date(date) << ',' << format_number(band.point[p]) << ',' << format_number(band.lower[p])
            << ',' << format_number(band.upper[p]) << '\n';
    }
}

nlohmann::json to_json(const spectral::KzftConfig& config) {
    return {{"m", config.m},
            {"k", config.k},
            {"nu", config.nu},
            {"span", config.span()},
            {"edge_policy", config.edge_policy == spectral::EdgePolicy::Strict ? "strict" : "renormalize"}};
}

nlohmann::json to_json(const resample::BandEstimate& band) {
    return {{"method", resample::to_string(band.method)},
            {"period", band.period},
            {"anchor_date", series::format_date(band.anchor_date)},
            {"replicates", band.replicates},
            {"mean_width", nullable(band.mean_width())},
            {"point", nullable(band.point)},
            {"lower", nullable(band.lower)},
            {"upper", nullable(band.upper)}};
}

nlohmann::json to_json(const resample::Significance& significance) {
    return {{"significant", significance.significant}, {"excluding_phases", significance.excluding_phases}};
}

nlohmann::json band_json(const resample::BandEstimate& band, const resample::BootstrapConfig& config) {
    auto j = to_json(band);
    j["config"] = {{"method", resample::to_string(config.method)},
                   {"period", config.period},
                   {"block_length", config.method == resample::Method::PBB ? config.period : config.block_length},
                   {"replicates", config.replicates},
                   {"master_seed", config.master_seed},
                   {"stream", config.stream}};
    return j;
}

void write_report_bands_csv(std::ostream& out, const analysis::AnalysisReport& report) {
    out << "method,component,label,period,phase,date_of_first_occurrence,month,point,lower,upper\n";
    if (report.vbpbb) {
        for (std::size_t c = 0; c < report.vbpbb->components.size(); ++c) {
            const auto& comp = report.vbpbb->components[c];
            write_band_rows(out, "VBPBB", std::to_string(c), comp.spec.label, comp.band);
        }
        if (report.vbpbb->combined) write_band_rows(out, "VBPBB", "combined", "significant components", *report.vbpbb->combined);
    }
    for (const auto& row : report.gsbb) {
        write_band_rows(out, "GSBB", std::to_string(row.component), report.specs[row.component].label, row.gsbb.band);
    }
}

nlohmann::json report_json(const analysis::AnalysisReport& report, const nlohmann::json& provenance) {
    nlohmann::json j;
    j["provenance"] = provenance;
    j["base_period"] = report.base_period;

    auto components = nlohmann::json::array();
    for (std::size_t c = 0; c < report.specs.size(); ++c) {
        const auto& spec = report.specs[c];
        nlohmann::json entry{{"index", c},
                             {"label", spec.label},
                             {"harmonic", spec.harmonic},
                             {"nu", spec.nu},
                             {"period", spec.period},
                             {"filter", to_json(spec.filter)}};
        if (report.vbpbb) {
            const auto& comp = report.vbpbb->components[c];
            entry["vbpbb"] = {{"band", to_json(comp.band)}, {"significance", to_json(comp.significance)}, {"r_squared", comp.r_squared}};
        }
        for (const auto& row : report.gsbb) {
            if (row.component != c) continue;
            entry["gsbb"] = {{"band", to_json(row.gsbb.band)}, {"significance", to_json(row.gsbb.significance)}};
            entry["width_ratio"] = row.width_ratio ? nlohmann::json(*row.width_ratio) : nlohmann::json(nullptr);
        }
        components.push_back(std::move(entry));
    }
    j["components"] = std::move(components);

    if (report.vbpbb) {
        nlohmann::json summary;
        summary["significant"] = report.vbpbb->significant;
        auto harmonics = nlohmann::json::array();
        for (const std::size_t c : report.vbpbb->significant) harmonics.push_back(report.specs[c].harmonic);
        summary["significant_harmonics"] = std::move(harmonics);
        summary["aggregate_r_squared"] =
            report.vbpbb->aggregate_r_squared ? nlohmann::json(*report.vbpbb->aggregate_r_squared) : nlohmann::json(nullptr);
        summary["combined"] = report.vbpbb->combined ? to_json(*report.vbpbb->combined) : nlohmann::json(nullptr);
        j["vbpbb"] = std::move(summary);
    }
    if (!report.gsbb.empty()) {
        auto harmonics = nlohmann::json::array();
        auto ratios = nlohmann::json::array();
        for (const auto& row : report.gsbb) {
            if (row.gsbb.significance.significant) harmonics.push_back(report.specs[row.component].harmonic);
            ratios.push_back({{"component", row.component},
                              {"label", report.specs[row.component].label},
                              {"gsbb_mean_width", nullable(row.gsbb.band.mean_width())},
                              {"width_ratio", row.width_ratio ? nlohmann::json(*row.width_ratio) : nlohmann::json(nullptr)}});
        }
        j["gsbb"] = {{"significant_harmonics", std::move(harmonics)}, {"width_ratios", std::move(ratios)}};
    }
    return j;
}

}  // namespace vbpbb::io
