#pragma once

#include <array>
#include <string>
#include <vector>

#include "geoadapt/records.hpp"
#include "geoadapt/text_norm.hpp"

namespace geoadapt::evalharness {

using records::EvalRecord;

// Street / City / Region / Country / Continent scales, in kilometers.
inline constexpr std::array<double, 5> kThresholdsKm{1.0, 25.0, 200.0, 750.0,
                                                     2500.0};
inline constexpr std::array<const char*, 5> kThresholdNames{
    "Street", "City", "Region", "Country", "Continent"};

struct MetricReport {
    std::array<double, 5> threshold_acc{};  // percents, one per threshold
    double city_acc = 0.0;                  // percent
    double country_acc = 0.0;               // percent
    std::size_t records = 0;
};

// Percent of records whose prediction lands within each threshold
// (inclusive boundary). Empty input is an error, never NaN.
std::array<double, 5> threshold_accuracies(const std::vector<EvalRecord>& recs);

// (city percent, country percent), exact match after name normalization;
// unknown predictions count as misses.
std::pair<double, double> name_accuracies(const std::vector<EvalRecord>& recs,
                                          const text::NameNormalizer& names);

MetricReport compute_report(const std::vector<EvalRecord>& recs,
                            const text::NameNormalizer& names);

enum class ReportFormat { json, csv, table };

ReportFormat format_from_string(std::string_view s);

// json/csv carry full precision; the table rounds to one decimal place.
std::string emit_report(const MetricReport& report, ReportFormat format);

MetricReport report_from_json_text(const std::string& text);

}  // namespace geoadapt::evalharness
