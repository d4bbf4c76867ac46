#include "geoadapt/evalharness.hpp"

#include <cstdio>

#include <json.hpp>

#include "geoadapt/errors.hpp"
#include "geoadapt/geodesy.hpp"

namespace geoadapt::evalharness {

using nlohmann::json;

namespace {

const std::array<std::string, 5> kAccKeys{"acc_1km", "acc_25km", "acc_200km",
                                          "acc_750km", "acc_2500km"};

std::string full_precision(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

std::array<double, 5> threshold_accuracies(
    const std::vector<EvalRecord>& recs) {
    if (recs.empty()) {
        throw ValidationError("cannot compute metrics over an empty set");
    }
    std::array<std::size_t, 5> hits{};
    for (const auto& r : recs) {
        const double d = geodesy::haversine_km(r.predicted.coord, r.truth.coord);
        for (std::size_t t = 0; t < kThresholdsKm.size(); ++t) {
            if (geodesy::within_threshold(d, kThresholdsKm[t])) ++hits[t];
        }
    }
    std::array<double, 5> acc{};
    for (std::size_t t = 0; t < hits.size(); ++t) {
        acc[t] = 100.0 * static_cast<double>(hits[t]) /
                 static_cast<double>(recs.size());
    }
    return acc;
}

std::pair<double, double> name_accuracies(const std::vector<EvalRecord>& recs,
                                          const text::NameNormalizer& names) {
    if (recs.empty()) {
        throw ValidationError("cannot compute metrics over an empty set");
    }
    std::size_t city_hits = 0;
    std::size_t country_hits = 0;
    for (const auto& r : recs) {
        if (names.names_match(r.predicted.city, r.truth.city)) ++city_hits;
        if (names.names_match(r.predicted.country, r.truth.country)) {
            ++country_hits;
        }
    }
    const double n = static_cast<double>(recs.size());
    return {100.0 * static_cast<double>(city_hits) / n,
            100.0 * static_cast<double>(country_hits) / n};
}

MetricReport compute_report(const std::vector<EvalRecord>& recs,
                            const text::NameNormalizer& names) {
    MetricReport report;
    report.threshold_acc = threshold_accuracies(recs);
    const auto [city, country] = name_accuracies(recs, names);
    report.city_acc = city;
    report.country_acc = country;
    report.records = recs.size();
    return report;
}

ReportFormat format_from_string(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "table") return ReportFormat::table;
    throw ValidationError("unknown report format '" + std::string(s) +
                          "' (expected json, csv or table)");
}

std::string emit_report(const MetricReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: {
            json j;
            for (std::size_t t = 0; t < kAccKeys.size(); ++t) {
                j[kAccKeys[t]] = report.threshold_acc[t];
            }
            j["city_name_acc"] = report.city_acc;
            j["country_name_acc"] = report.country_acc;
            j["records"] = report.records;
            return j.dump() + "\n";
        }
        case ReportFormat::csv: {
            std::string out =
                "records,acc_1km,acc_25km,acc_200km,acc_750km,acc_2500km,"
                "city_name_acc,country_name_acc\n";
            out += std::to_string(report.records);
            for (double a : report.threshold_acc) {
                out += ',';
                out += full_precision(a);
            }
            out += ',';
            out += full_precision(report.city_acc);
            out += ',';
            out += full_precision(report.country_acc);
            out += '\n';
            return out;
        }
        case ReportFormat::table: {
            std::string out;
            char line[160];
            std::snprintf(line, sizeof(line), "%-12s", "");
            out = line;
            for (const char* name : kThresholdNames) {
                std::snprintf(line, sizeof(line), "%10s", name);
                out += line;
            }
            out += '\n';
            std::snprintf(line, sizeof(line), "%-12s", "");
            out += line;
            static const std::array<const char*, 5> kKm{"1km", "25km", "200km",
                                                        "750km", "2500km"};
            for (const char* km : kKm) {
                std::snprintf(line, sizeof(line), "%10s", km);
                out += line;
            }
            out += '\n';
            std::snprintf(line, sizeof(line), "%-12s", "Accuracy %");
            out += line;
            for (double a : report.threshold_acc) {
                std::snprintf(line, sizeof(line), "%10s", one_decimal(a).c_str());
                out += line;
            }
            out += '\n';
            std::snprintf(line, sizeof(line), "Records            %zu\n",
                          report.records);
            out += line;
            std::snprintf(line, sizeof(line), "City Name Acc %%    %s\n",
                          one_decimal(report.city_acc).c_str());
            out += line;
            std::snprintf(line, sizeof(line), "Country Name Acc %% %s\n",
                          one_decimal(report.country_acc).c_str());
            out += line;
            return out;
        }
    }
    throw ValidationError("unhandled report format");
}

MetricReport report_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid report json: ") + e.what());
    }
    MetricReport report;
    try {
        for (std::size_t t = 0; t < kAccKeys.size(); ++t) {
            report.threshold_acc[t] = j.at(kAccKeys[t]).get<double>();
        }
        report.city_acc = j.at("city_name_acc").get<double>();
        report.country_acc = j.at("country_name_acc").get<double>();
        report.records = j.at("records").get<std::size_t>();
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid report json: ") + e.what());
    }
    return report;
}

}  // namespace geoadapt::evalharness
