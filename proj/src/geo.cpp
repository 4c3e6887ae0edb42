#include "wandrelay/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wandrelay {

namespace {
constexpr double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

bool is_valid(const LatLon& p) noexcept {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_distance(const LatLon& a, const LatLon& b) noexcept {
    const double phi1 = to_radians(a.lat);
    const double phi2 = to_radians(b.lat);
    const double dphi = phi2 - phi1;
    const double dlambda = to_radians(b.lon - a.lon);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(h));
}

LatLon interpolate(const LatLon& from, const LatLon& to, double fraction) noexcept {
    const double f = std::clamp(fraction, 0.0, 1.0);
    if (f == 0.0) return from;
    if (f == 1.0) return to;
    return {from.lat + (to.lat - from.lat) * f, from.lon + (to.lon - from.lon) * f};
}

}  // namespace wandrelay
