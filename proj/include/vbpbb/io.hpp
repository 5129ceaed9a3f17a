#pragma once

#include "vbpbb/analysis.hpp"
#include "vbpbb/resample.hpp"
#include "vbpbb/spectral.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace vbpbb::io {

/// Fixed-format number used in every CSV export ("nan"/"inf" for non-finite values).
[[nodiscard]] std::string format_number(double value);

/// `date,re,im,bandpass,missing`
void write_filter_csv(std::ostream& out, const spectral::FilterResult& result);

/// `frequency,period_days,power`
void write_periodogram_csv(std::ostream& out, const spectral::Periodogram& pg);

/// `phase,date_of_first_occurrence,point,lower,upper`
void write_band_csv(std::ostream& out, const resample::BandEstimate& band);

[[nodiscard]] nlohmann::json to_json(const spectral::KzftConfig& config);
[[nodiscard]] nlohmann::json to_json(const resample::BandEstimate& band);
[[nodiscard]] nlohmann::json to_json(const resample::Significance& significance);

/// Band plus the bootstrap settings that produced it.
[[nodiscard]] nlohmann::json band_json(const resample::BandEstimate& band, const resample::BootstrapConfig& config);

/**
 * Flat table of every band in a report:
 * `method,component,label,period,phase,date_of_first_occurrence,month,point,lower,upper`.
 * The combined VBPBB band uses component "combined".
 */
void write_report_bands_csv(std::ostream& out, const analysis::AnalysisReport& report);

/// Full report; `provenance` is embedded verbatim under "provenance".
[[nodiscard]] nlohmann::json report_json(const analysis::AnalysisReport& report, const nlohmann::json& provenance);

}  // namespace vbpbb::io
