#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "geoadapt/errors.hpp"
#include "geoadapt/evalharness.hpp"
#include "geoadapt/geodesy.hpp"

using geoadapt::ValidationError;
using geoadapt::geodesy::GeoCoord;
using geoadapt::rewards::GeoLocation;
using geoadapt::text::NameNormalizer;
using namespace geoadapt::evalharness;

namespace {

double km_to_lon(double km) {
    return km / geoadapt::geodesy::kEarthRadiusKm * 180.0 /
           geoadapt::geodesy::kPi;
}

EvalRecord at_distance(const std::string& id, double km, const char* pred_country,
                       const char* pred_city) {
    EvalRecord r;
    r.image_id = id;
    r.truth = {"France", "Paris", GeoCoord(0.0, 0.0)};
    r.predicted = {pred_country, pred_city, GeoCoord(0.0, km_to_lon(km))};
    return r;
}

// independent recount with the atan2 form of the haversine distance
double oracle_distance(const GeoCoord& a, const GeoCoord& b) {
    const double rad = geoadapt::geodesy::kPi / 180.0;
    const double sdlat = std::sin((b.lat() - a.lat()) * rad / 2.0);
    const double sdlon = std::sin((b.lon() - a.lon()) * rad / 2.0);
    const double h = sdlat * sdlat +
                     std::cos(a.lat() * rad) * std::cos(b.lat() * rad) *
                         sdlon * sdlon;
    return 2.0 * geoadapt::geodesy::kEarthRadiusKm *
           std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

MetricReport oracle_report(const std::vector<EvalRecord>& recs,
                           const NameNormalizer& names) {
    MetricReport rep;
    rep.records = recs.size();
    std::array<std::size_t, 5> hits{};
    std::size_t city = 0, country = 0;
    for (const auto& r : recs) {
        const double d = oracle_distance(r.predicted.coord, r.truth.coord);
        for (std::size_t t = 0; t < kThresholdsKm.size(); ++t) {
            if (d <= kThresholdsKm[t]) ++hits[t];
        }
        if (names.names_match(r.predicted.city, r.truth.city)) ++city;
        if (names.names_match(r.predicted.country, r.truth.country)) ++country;
    }
    for (std::size_t t = 0; t < hits.size(); ++t) {
        rep.threshold_acc[t] = 100.0 * static_cast<double>(hits[t]) /
                               static_cast<double>(recs.size());
    }
    rep.city_acc =
        100.0 * static_cast<double>(city) / static_cast<double>(recs.size());
    rep.country_acc =
        100.0 * static_cast<double>(country) / static_cast<double>(recs.size());
    return rep;
}

}  // namespace

TEST_CASE("all-exact predictions score 100 everywhere") {
    std::vector<EvalRecord> recs;
    for (int i = 0; i < 3; ++i) {
        recs.push_back(at_distance("r" + std::to_string(i), 0.0, "France",
                                   "Paris"));
    }
    const auto acc = threshold_accuracies(recs);
    for (double a : acc) CHECK(a == 100.0);
    NameNormalizer names;
    const auto [city, country] = name_accuracies(recs, names);
    CHECK(city == 100.0);
    CHECK(country == 100.0);
}

TEST_CASE("four-record fixture matches the hand count") {
    std::vector<EvalRecord> recs{
        at_distance("e1", 0.5, "France", "Paris"),
        at_distance("e2", 20.0, "France", "Paris"),
        at_distance("e3", 150.0, "France", "Lyon"),
        at_distance("e4", 2000.0, "Spain", "Madrid"),
    };
    const auto acc = threshold_accuracies(recs);
    CHECK(acc[0] == 25.0);
    CHECK(acc[1] == 50.0);
    CHECK(acc[2] == 75.0);
    CHECK(acc[3] == 75.0);
    CHECK(acc[4] == 100.0);

    NameNormalizer names;
    const auto [city, country] = name_accuracies(recs, names);
    CHECK(city == 50.0);
    CHECK(country == 75.0);
}

TEST_CASE("a record exactly on the 2500 km boundary counts as a hit") {
    double lon = km_to_lon(2500.0);
    GeoCoord truth(0.0, 0.0);
    // walk below the boundary if rounding overshot it
    while (geoadapt::geodesy::haversine_km(GeoCoord(0.0, lon), truth) > 2500.0) {
        lon = std::nextafter(lon, 0.0);
    }
    EvalRecord rec;
    rec.image_id = "b";
    rec.truth = {"France", "Paris", truth};
    rec.predicted = {"France", "Paris", GeoCoord(0.0, lon)};
    const double d = geoadapt::geodesy::haversine_km(rec.predicted.coord,
                                                     rec.truth.coord);
    CHECK(d <= 2500.0);
    CHECK(d > 2499.999999);
    const auto acc = threshold_accuracies({rec});
    CHECK(acc[4] == 100.0);
    CHECK(acc[3] == 0.0);
}

TEST_CASE("empty input is an explicit error") {
    CHECK_THROWS_AS(threshold_accuracies({}), ValidationError);
    NameNormalizer names;
    CHECK_THROWS_AS(name_accuracies({}, names), ValidationError);
}

TEST_CASE("unknown predictions count as misses") {
    std::vector<EvalRecord> recs{
        at_distance("u1", 0.0, "Unknown", "Unknown"),
        at_distance("u2", 0.0, "France", "Paris"),
    };
    NameNormalizer names;
    const auto [city, country] = name_accuracies(recs, names);
    CHECK(city == 50.0);
    CHECK(country == 50.0);
}

TEST_CASE("metrics equal the brute-force oracle on random fixtures") {
    std::mt19937_64 rng(1234);
    NameNormalizer names;
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    const char* cities[] = {"Paris", "Lyon", "Unknown"};
    const char* countries[] = {"France", "Spain", "Unknown"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EvalRecord> recs;
        const int n = 1 + static_cast<int>(uniform(0.0, 49.0));
        for (int i = 0; i < n; ++i) {
            EvalRecord r;
            r.image_id = "r" + std::to_string(i);
            r.truth = {"France", "Paris",
                       GeoCoord(uniform(-80, 80), uniform(-180, 180))};
            r.predicted = {countries[static_cast<int>(uniform(0, 3)) % 3],
                           cities[static_cast<int>(uniform(0, 3)) % 3],
                           GeoCoord(uniform(-80, 80), uniform(-180, 180))};
            recs.push_back(r);
        }
        const auto report = compute_report(recs, names);
        const auto oracle = oracle_report(recs, names);
        for (std::size_t t = 0; t < kThresholdsKm.size(); ++t) {
            CHECK(report.threshold_acc[t] == oracle.threshold_acc[t]);
        }
        CHECK(report.city_acc == oracle.city_acc);
        CHECK(report.country_acc == oracle.country_acc);

        // monotonic across increasing thresholds
        for (std::size_t t = 1; t < kThresholdsKm.size(); ++t) {
            CHECK(report.threshold_acc[t] >= report.threshold_acc[t - 1]);
        }

        // permutation invariance
        auto shuffled = recs;
        std::reverse(shuffled.begin(), shuffled.end());
        const auto report2 = compute_report(shuffled, names);
        CHECK(report2.threshold_acc == report.threshold_acc);
        CHECK(report2.city_acc == report.city_acc);
    }
}

TEST_CASE("json report round-trips structurally") {
    MetricReport rep;
    rep.threshold_acc = {25.0, 50.0, 75.0, 75.0, 100.0};
    rep.city_acc = 50.0;
    rep.country_acc = 75.0;
    rep.records = 4;
    const std::string text = emit_report(rep, ReportFormat::json);
    const MetricReport back = report_from_json_text(text);
    CHECK(back.threshold_acc == rep.threshold_acc);
    CHECK(back.city_acc == rep.city_acc);
    CHECK(back.country_acc == rep.country_acc);
    CHECK(back.records == rep.records);
}

TEST_CASE("csv has the fixed header and table carries all five columns") {
    MetricReport rep;
    rep.threshold_acc = {25.0, 50.0, 75.0, 75.0, 100.0};
    rep.city_acc = 50.0;
    rep.country_acc = 75.0;
    rep.records = 4;

    const std::string csv = emit_report(rep, ReportFormat::csv);
    CHECK(csv.rfind("records,acc_1km,acc_25km,acc_200km,acc_750km,acc_2500km,"
                    "city_name_acc,country_name_acc\n",
                    0) == 0);

    const std::string table = emit_report(rep, ReportFormat::table);
    for (const char* name : {"Street", "City", "Region", "Country",
                             "Continent"}) {
        CHECK(table.find(name) != std::string::npos);
    }
    for (const char* km : {"1km", "25km", "200km", "750km", "2500km"}) {
        CHECK(table.find(km) != std::string::npos);
    }
    CHECK(table.find("75.0") != std::string::npos);

    CHECK_THROWS_AS(format_from_string("xml"), ValidationError);
}
