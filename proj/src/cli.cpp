#include "vbpbb/cli.hpp"

#include "vbpbb/analysis.hpp"
#include "vbpbb/io.hpp"
#include "vbpbb/rng.hpp"
#include "vbpbb/series.hpp"
#include "vbpbb/spectral.hpp"
#include "vbpbb/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace vbpbb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct InputParams {
    std::string input;
    std::string date_col = "date";
    std::string value_col = "value";
    std::string date_format = "%Y-%m-%d";
    std::string population;  // scalar or path; empty means no rate conversion
};

struct AnalyzeParams {
    InputParams in;
    std::size_t base_period = 365;
    std::size_t harmonics = 6;
    std::string method = "both";
    std::size_t replicates = 10000;
    std::optional<std::size_t> block_length;
    std::optional<std::size_t> window;
    std::uint64_t seed = 0;
    bool paper_exact = false;
    std::string edge_policy = "renormalize";
    std::string combine = "sum";
};

void add_input_options(CLI::App* cmd, InputParams& p, bool required) {
    auto* opt = cmd->add_option("--input", p.input, "Input CSV (header row, comma-delimited)");
    if (required) opt->required();
    cmd->add_option("--date-col", p.date_col, "Date column name")->capture_default_str();
    cmd->add_option("--value-col", p.value_col, "Value column name")->capture_default_str();
    cmd->add_option("--date-format", p.date_format, "Date pattern using %Y %m %d")->capture_default_str();
    cmd->add_option("--population", p.population, "Population: a positive number or a CSV of year,population");
}

std::optional<double> parse_scalar(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string now_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

series::TimeSeries load_series(const InputParams& p, std::ostream& out) {
    std::ifstream file(p.input, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open input " + p.input);
    auto s = series::parse_csv_series(file, {p.date_col, p.value_col}, p.date_format);
    if (!p.population.empty()) {
        if (const auto scalar = parse_scalar(p.population)) {
            s = series::to_rate(s, series::PopulationTable(*scalar));
        } else {
            std::ifstream pop(p.population);
            if (!pop) throw std::runtime_error("cannot open population file " + p.population);
            s = series::to_rate(s, series::PopulationTable::from_csv(pop));
        }
    }
    out << "loaded " << s.size() << " days from " << series::format_date(s.start_date()) << " to "
        << series::format_date(s.date_at(s.size() - 1)) << " (" << s.missing_count() << " missing)\n";
    return s;
}

json inputs_json(const InputParams& p) {
    json inputs;
    inputs["input"] = {{"path", p.input}, {"sha256", file_sha256(p.input)}};
    if (!p.population.empty() && !parse_scalar(p.population)) {
        inputs["population"] = {{"path", p.population}, {"sha256", file_sha256(p.population)}};
    }
    return inputs;
}

json to_json(const AnalyzeParams& p) {
    return {{"input", p.in.input},
            {"date_col", p.in.date_col},
            {"value_col", p.in.value_col},
            {"date_format", p.in.date_format},
            {"population", p.in.population},
            {"base_period", p.base_period},
            {"harmonics", p.harmonics},
            {"method", p.method},
            {"replicates", p.replicates},
            {"block_length", p.block_length ? json(*p.block_length) : json(nullptr)},
            {"window", p.window ? json(*p.window) : json(nullptr)},
            {"seed", p.seed},
            {"paper_exact", p.paper_exact},
            {"edge_policy", p.edge_policy},
            {"combine", p.combine}};
}

AnalyzeParams analyze_params_from(const json& j) {
    AnalyzeParams p;
    p.in.input = j.at("input").get<std::string>();
    p.in.date_col = j.at("date_col").get<std::string>();
    p.in.value_col = j.at("value_col").get<std::string>();
    p.in.date_format = j.at("date_format").get<std::string>();
    p.in.population = j.at("population").get<std::string>();
    p.base_period = j.at("base_period").get<std::size_t>();
    p.harmonics = j.at("harmonics").get<std::size_t>();
    p.method = j.at("method").get<std::string>();
    p.replicates = j.at("replicates").get<std::size_t>();
    if (!j.at("block_length").is_null()) p.block_length = j.at("block_length").get<std::size_t>();
    if (!j.at("window").is_null()) p.window = j.at("window").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.paper_exact = j.at("paper_exact").get<bool>();
    p.edge_policy = j.at("edge_policy").get<std::string>();
    p.combine = j.at("combine").get<std::string>();
    return p;
}

std::string plot_name(std::size_t c) {
    return "component_" + std::to_string(c) + ".svg";
}

int cmd_analyze(AnalyzeParams p, const std::string& output_dir, std::size_t threads, const std::string& from_manifest, bool seed_given,
                std::ostream& out) {
    if (!from_manifest.empty()) {
        std::ifstream mf(from_manifest);
        if (!mf) throw std::runtime_error("cannot open manifest " + from_manifest);
        const json manifest = json::parse(mf);
        if (manifest.at("command") != "analyze") throw std::runtime_error("manifest was not written by 'analyze'");
        p = analyze_params_from(manifest.at("parameters"));
        const auto recorded = manifest.at("inputs").at("input").at("sha256").get<std::string>();
        if (recorded != file_sha256(p.in.input)) throw std::runtime_error("input digest differs from the manifest: " + p.in.input);
        seed_given = true;
    }
    if (!seed_given) {
        p.seed = rng::entropy_seed();
        out << "no --seed given; drew seed " << p.seed << '\n';
    }
    if (p.paper_exact && !p.window) p.window = 731;

    const auto series = load_series(p.in, out);
    const auto edge = p.edge_policy == "strict" ? spectral::EdgePolicy::Strict : spectral::EdgePolicy::Renormalize;
    const auto specs = analysis::default_component_set(p.base_period, p.harmonics, p.window, edge);

    analysis::AnalysisOptions options;
    options.methods = p.method == "vbpbb"  ? analysis::MethodSelection::Vbpbb
                      : p.method == "gsbb" ? analysis::MethodSelection::Gsbb
                                           : analysis::MethodSelection::Both;
    options.pipeline.replicates = p.replicates;
    options.pipeline.seed = p.seed;
    options.pipeline.threads = threads;
    options.pipeline.combine = p.combine == "series" ? analysis::CombineMode::SummedSeries : analysis::CombineMode::SumOfComponents;
    options.block_length = p.block_length;

    const auto report = analysis::analyze(series, p.base_period, specs, options);

    const fs::path dir(output_dir);
    fs::create_directories(dir / "plots");
    fs::create_directories(dir / "bands");

    json manifest{{"command", "analyze"},
                  {"tool_version", kToolVersion},
                  {"timestamp", now_utc()},
                  {"master_seed", p.seed},
                  {"parameters", to_json(p)},
                  {"inputs", inputs_json(p.in)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    json provenance = manifest;
    provenance.erase("timestamp");
    provenance["missing_count"] = series.missing_count();
    provenance["series_length"] = series.size();
    provenance["unit"] = series::to_string(series.unit());
    write_text(dir / "report.json", io::report_json(report, provenance).dump(2) + "\n");

    {
        std::ostringstream csv;
        io::write_report_bands_csv(csv, report);
        write_text(dir / "bands.csv", csv.str());
    }

    const std::string y_label = series.unit() == series::Unit::RatePer1000 ? "per 1000 population" : "value";
    {
        svg::PlotOptions opts;
        opts.title = "Input series";
        opts.y_label = y_label;
        write_text(dir / "plots" / "series.svg", svg::emit_svg_series(series, opts));
    }

    for (std::size_t c = 0; c < specs.size(); ++c) {
        std::vector<svg::BandLayer> layers;
        const resample::BandEstimate* gsbb_band = nullptr;
        for (const auto& row : report.gsbb) {
            if (row.component == c) gsbb_band = &row.gsbb.band;
        }
        if (gsbb_band) {
            layers.push_back({gsbb_band, svg::baseline_style()});
            std::ostringstream csv;
            io::write_band_csv(csv, *gsbb_band);
            write_text(dir / "bands" / ("gsbb_" + std::to_string(c) + ".csv"), csv.str());
        }
        if (report.vbpbb) {
            const auto& band = report.vbpbb->components[c].band;
            layers.push_back({&band, svg::treatment_style()});
            std::ostringstream csv;
            io::write_band_csv(csv, band);
            write_text(dir / "bands" / ("vbpbb_" + std::to_string(c) + ".csv"), csv.str());
        }
        svg::PlotOptions opts;
        opts.title = "95% CI band, " + specs[c].label;
        opts.y_label = y_label;
        write_text(dir / "plots" / plot_name(c), svg::emit_svg_bands(layers, opts));
    }
    if (report.vbpbb && report.vbpbb->combined) {
        svg::PlotOptions opts;
        opts.title = "95% CI band, sum of significant components";
        opts.y_label = y_label;
        write_text(dir / "plots" / "combined.svg", svg::emit_svg_band(*report.vbpbb->combined, svg::treatment_style(), opts));
        std::ostringstream csv;
        io::write_band_csv(csv, *report.vbpbb->combined);
        write_text(dir / "bands" / "vbpbb_combined.csv", csv.str());
    }

    for (std::size_t c = 0; c < specs.size(); ++c) {
        out << specs[c].label << ':';
        if (report.vbpbb) {
            const auto& comp = report.vbpbb->components[c];
            out << " VBPBB " << (comp.significance.significant ? "significant" : "not significant") << " (R^2 " << io::format_number(comp.r_squared)
                << ")";
        }
        for (const auto& row : report.gsbb) {
            if (row.component != c) continue;
            out << " GSBB " << (row.gsbb.significance.significant ? "significant" : "not significant");
            if (row.width_ratio) out << " width ratio " << io::format_number(*row.width_ratio);
        }
        out << '\n';
    }
    if (report.vbpbb && report.vbpbb->aggregate_r_squared) {
        out << "aggregate R^2 of significant components: " << io::format_number(*report.vbpbb->aggregate_r_squared) << '\n';
    }
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
}

struct SynthParams {
    std::string spec;
    std::size_t n = 0;
    double noise_sd = 0.0;
    std::string noise = "white";
    double ar = 0.0;
    std::uint64_t seed = 0;
    std::string output = "series.csv";
    std::string truth = "truth.json";
};

std::vector<series::SynthComponent> parse_component_list(const std::string& text) {
    std::vector<series::SynthComponent> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::vector<double> parts;
        std::stringstream is(item);
        std::string field;
        while (std::getline(is, field, ':')) {
            const auto v = parse_scalar(field);
            if (!v) throw CLI::ValidationError("--spec", "cannot parse '" + field + "' in '" + item + "'");
            parts.push_back(*v);
        }
        if (parts.size() != 3) throw CLI::ValidationError("--spec", "expected period:amplitude:phase, got '" + item + "'");
        out.push_back({parts[0], parts[1], parts[2]});
    }
    if (out.empty()) throw CLI::ValidationError("--spec", "no components given");
    return out;
}

int cmd_synth(const SynthParams& p, std::ostream& out) {
    series::SynthSpec spec;
    spec.n = p.n;
    spec.components = parse_component_list(p.spec);
    spec.noise_sd = p.noise_sd;
    spec.noise_kind = p.noise == "ar1" ? series::NoiseKind::AR1 : series::NoiseKind::White;
    spec.ar_coefficient = p.ar;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--spec", e.what());
    }

    const auto result = series::synth_series(spec, p.seed);
    {
        std::ofstream csv(p.output, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + p.output);
        series::write_csv_series(csv, result.series);
    }
    json truth{{"seed", p.seed}, {"n", p.n}, {"noise_sd", p.noise_sd}, {"noise", p.noise}, {"ar", p.ar}};
    auto components = json::array();
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        components.push_back({{"period", comp.period},
                              {"amplitude", comp.amplitude},
                              {"phase", comp.phase},
                              {"bootstrap_period", result.true_periodic_means[c].size()},
                              {"periodic_mean", result.true_periodic_means[c]}});
    }
    truth["components"] = std::move(components);
    write_text(p.truth, truth.dump(2) + "\n");
    out << "wrote " << p.output << " and " << p.truth << '\n';
    return kExitOk;
}

int cmd_periodogram(const InputParams& in, const std::string& output, std::size_t top, double min_separation, std::ostream& out) {
    const auto s = load_series(in, out);
    const auto pg = spectral::periodogram(s);
    if (!output.empty()) {
        std::ostringstream csv;
        io::write_periodogram_csv(csv, pg);
        write_text(output, csv.str());
    }
    if (pg.imputed_count) out << pg.imputed_count << " missing values mean-imputed\n";
    out << "frequency,period_days,power\n";
    for (const auto& peak : spectral::peak_candidates(pg, top, min_separation)) {
        out << io::format_number(peak.frequency) << ',' << io::format_number(peak.period) << ',' << io::format_number(peak.power) << '\n';
    }
    return kExitOk;
}

int cmd_filter(const InputParams& in, const spectral::KzftConfig& config, const std::string& output, std::ostream& out) {
    const auto s = load_series(in, out);
    const auto result = spectral::kzft_apply(s, config);
    std::ostringstream csv;
    io::write_filter_csv(csv, result);
    write_text(output, csv.str());
    out << "wrote " << output << '\n';
    return kExitOk;
}

}  // namespace

std::string file_sha256(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> guard(ctx, &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (file.read(buf, sizeof buf) || file.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(file.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic-mean confidence bands with KZFT bandpass filters and block bootstraps", "vbpbb"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // analyze
    AnalyzeParams ap;
    std::string output_dir = "vbpbb-out";
    std::string from_manifest;
    std::size_t threads = 0;
    std::size_t block_length = 0;
    std::size_t window = 0;
    auto* analyze = app.add_subcommand("analyze", "Filter, bootstrap and compare periodic components");
    add_input_options(analyze, ap.in, false);
    analyze->add_option("--base-period", ap.base_period, "Fundamental period in days")->check(CLI::PositiveNumber)->capture_default_str();
    analyze->add_option("--harmonics", ap.harmonics, "Number of harmonics including the fundamental")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    analyze->add_option("--method", ap.method, "vbpbb, gsbb or both")->check(CLI::IsMember({"vbpbb", "gsbb", "both"}))->capture_default_str();
    analyze->add_option("--replicates", ap.replicates, "Bootstrap replicates B")->check(CLI::PositiveNumber)->capture_default_str();
    auto* block_opt = analyze->add_option("--block-length", block_length, "GSBB block length (default: base period)")->check(CLI::PositiveNumber);
    auto* window_opt = analyze->add_option("--window", window, "KZFT window m for every component (default 2*base+1)")->check(CLI::PositiveNumber);
    auto* seed_opt = analyze->add_option("--seed", ap.seed, "Master seed (drawn and recorded when absent)");
    analyze->add_flag("--paper-exact", ap.paper_exact, "Pin m = 731 at every scale");
    analyze->add_option("--edge-policy", ap.edge_policy, "renormalize or strict")
        ->check(CLI::IsMember({"renormalize", "strict"}))
        ->capture_default_str();
    analyze->add_option("--combine", ap.combine, "sum (of component replicates) or series (PBB of the summed series)")
        ->check(CLI::IsMember({"sum", "series"}))
        ->capture_default_str();
    analyze->add_option("--threads", threads, "Worker threads (0 = all cores); never changes results")->check(CLI::NonNegativeNumber);
    analyze->add_option("--output", output_dir, "Output directory")->capture_default_str();
    analyze->add_option("--from-manifest", from_manifest, "Re-run with the parameters recorded in a manifest.json");

    // synth
    SynthParams sp;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic periodic series and its true periodic means");
    synth->add_option("--spec", sp.spec, "Components as period:amplitude:phase[,...]")->required();
    synth->add_option("--n", sp.n, "Series length")->required()->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    synth->add_option("--noise-sd", sp.noise_sd, "Noise standard deviation")->check(CLI::NonNegativeNumber)->capture_default_str();
    synth->add_option("--noise", sp.noise, "white or ar1")->check(CLI::IsMember({"white", "ar1"}))->capture_default_str();
    synth->add_option("--ar", sp.ar, "AR(1) coefficient in (-1, 1)")->check(CLI::Range(-0.999999, 0.999999));
    synth->add_option("--seed", sp.seed, "Seed")->required();
    synth->add_option("--output", sp.output, "Series CSV path")->capture_default_str();
    synth->add_option("--truth", sp.truth, "Truth JSON path")->capture_default_str();

    // periodogram
    InputParams pin;
    std::string pg_output;
    std::size_t top = 10;
    double min_sep = 0.0;
    auto* pgram = app.add_subcommand("periodogram", "Periodogram and dominant peaks");
    add_input_options(pgram, pin, true);
    pgram->add_option("--output", pg_output, "Periodogram CSV path");
    pgram->add_option("--top", top, "Number of peaks to list")->check(CLI::PositiveNumber)->capture_default_str();
    pgram->add_option("--min-separation", min_sep, "Minimum frequency gap between listed peaks")->check(CLI::NonNegativeNumber);

    // filter
    InputParams fin;
    spectral::KzftConfig fcfg;
    std::string f_output = "filter.csv";
    std::string f_edge = "renormalize";
    auto* filter = app.add_subcommand("filter", "Apply one KZFT bandpass filter");
    add_input_options(filter, fin, true);
    filter->add_option("--m", fcfg.m, "Window length (odd)")->check(CLI::PositiveNumber)->capture_default_str();
    filter->add_option("--k", fcfg.k, "Iterations")->check(CLI::PositiveNumber)->capture_default_str();
    filter->add_option("--nu", fcfg.nu, "Center frequency, cycles/day")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    filter->add_option("--edge-policy", f_edge, "renormalize or strict")->check(CLI::IsMember({"renormalize", "strict"}));
    filter->add_option("--output", f_output, "Filter CSV path")->capture_default_str();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("vbpbb");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (analyze->parsed() && from_manifest.empty() && ap.in.input.empty()) {
            throw CLI::RequiredError("--input");
        }
        if (filter->parsed() && fcfg.m % 2 == 0) throw CLI::ValidationError("--m", "window must be odd");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            if (block_opt->count()) ap.block_length = block_length;
            if (window_opt->count()) ap.window = window;
            return cmd_analyze(ap, output_dir, threads, from_manifest, seed_opt->count() > 0, out);
        }
        if (synth->parsed()) return cmd_synth(sp, out);
        if (pgram->parsed()) return cmd_periodogram(pin, pg_output, top, min_sep, out);
        if (filter->parsed()) {
            fcfg.edge_policy = f_edge == "strict" ? spectral::EdgePolicy::Strict : spectral::EdgePolicy::Renormalize;
            return cmd_filter(fin, fcfg, f_output, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitUsage;
}

}  // namespace vbpbb::cli
