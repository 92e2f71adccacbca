#include "adl/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adl::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double half_chord(const GeoPoint& a, const GeoPoint& b) {
    const double s_lat = std::sin((b.lat - a.lat) * kDegToRad / 2.0);
    const double s_lon = std::sin((b.lon - a.lon) * kDegToRad / 2.0);
    return s_lat * s_lat + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s_lon * s_lon;
}

}  // namespace

double haversine(const GeoPoint& a, const GeoPoint& b) {
    // sin^2 is even, so only the cosine product depends on argument order; it is commutative.
    const double h = std::clamp(half_chord(a, b), 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double distance_traveled(std::span<const GeoPoint> track, double min_step_m) {
    double total = 0.0;
    for (std::size_t i = 1; i < track.size(); ++i) {
        const double leg = haversine(track[i - 1], track[i]);
        if (leg >= min_step_m) total += leg;
    }
    return total;
}

double distance_traveled(const std::vector<GpsSample>& track, double min_step_m) {
    std::vector<GeoPoint> points;
    points.reserve(track.size());
    for (const auto& s : track) points.push_back({s.lat, s.lon});
    return distance_traveled(points, min_step_m);
}

}  // namespace adl::geo
