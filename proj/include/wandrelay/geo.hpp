#pragma once

namespace wandrelay {

inline constexpr double kEarthRadiusMeters = 6371000.0;

struct LatLon {
    double lat = 0.0;  // decimal degrees
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

bool is_valid(const LatLon& p) noexcept;

// Great-circle distance in meters on a sphere of kEarthRadiusMeters.
double haversine_distance(const LatLon& a, const LatLon& b) noexcept;

// Linear interpolation in degree space; fraction is clamped to [0, 1].
LatLon interpolate(const LatLon& from, const LatLon& to, double fraction) noexcept;

}  // namespace wandrelay
