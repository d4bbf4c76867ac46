#pragma once

#include <cmath>

namespace geoadapt::geodesy {

// Mean Earth radius. All distances in this library are kilometers on the
// sphere of this radius.
inline constexpr double kEarthRadiusKm = 6371.0;

inline constexpr double kPi = 3.14159265358979323846;

// Latitude/longitude in decimal degrees. Latitude must lie in [-90, 90];
// longitude is wrapped into (-180, 180] on construction, with -180
// identified with 180. Non-finite input is rejected.
class GeoCoord {
public:
    GeoCoord(double lat_deg, double lon_deg);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    bool operator==(const GeoCoord& other) const noexcept {
        return lat_ == other.lat_ && lon_ == other.lon_;
    }

private:
    double lat_;
    double lon_;
};

// Great-circle distance between two points, in kilometers.
double haversine_km(const GeoCoord& a, const GeoCoord& b);

// Inclusive threshold test: true iff d <= t. Requires d >= 0 and t > 0.
bool within_threshold(double distance_km, double threshold_km);

}  // namespace geoadapt::geodesy
