#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tokbias/metrics.hpp"

namespace tokbias {

enum class ReportFormat { Json, Csv, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

inline constexpr std::string_view kMetricsSchema = "tokbias.metrics/1";

/// Lossless JSON form.
std::string report_to_json(const MetricsReport& report);
/// Throws MalformedRecord.
MetricsReport report_from_json(std::string_view json);

/// file name -> contents. Json and Markdown yield a single document; Csv
/// yields one file per populated table.
std::map<std::string, std::string> render_report(const MetricsReport& report, ReportFormat format);

}  // namespace tokbias
