#include "geoadapt/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geoadapt/errors.hpp"

namespace geoadapt::geodesy {

namespace {

double deg2rad(double deg) { return deg * kPi / 180.0; }

double wrap_longitude(double lon) {
    // remainder() lands in [-180, 180]; identify -180 with 180.
    double w = std::remainder(lon, 360.0);
    if (w == -180.0) w = 180.0;
    // avoid signed zero leaking into comparisons
    if (w == 0.0) w = 0.0;
    return w;
}

}  // namespace

GeoCoord::GeoCoord(double lat_deg, double lon_deg) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
        throw ValidationError("coordinate must be finite");
    }
    if (lat_deg < -90.0 || lat_deg > 90.0) {
        throw ValidationError("latitude " + std::to_string(lat_deg) +
                              " outside [-90, 90]");
    }
    lat_ = lat_deg;
    lon_ = wrap_longitude(lon_deg);
}

double haversine_km(const GeoCoord& a, const GeoCoord& b) {
    const double phi1 = deg2rad(a.lat());
    const double phi2 = deg2rad(b.lat());
    const double dphi = deg2rad(b.lat() - a.lat());
    const double dlam = deg2rad(b.lon() - a.lon());

    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlam / 2.0);
    const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    const double root = std::sqrt(std::min(1.0, h));
    return 2.0 * kEarthRadiusKm * std::asin(root);
}

bool within_threshold(double distance_km, double threshold_km) {
    if (!(distance_km >= 0.0)) {
        throw ValidationError("distance must be non-negative");
    }
    if (!(threshold_km > 0.0)) {
        throw ValidationError("threshold must be positive");
    }
    return distance_km <= threshold_km;
}

}  // namespace geoadapt::geodesy
