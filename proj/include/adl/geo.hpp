#pragma once

#include <span>
#include <vector>

#include "adl/ingest.hpp"

namespace adl::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]
};

/// Great-circle distance in metres on a spherical Earth.
double haversine(const GeoPoint& a, const GeoPoint& b);

/// Sum of haversine legs; 0 for fewer than two points. Legs shorter than
/// `min_step_m` are dropped (0 keeps every leg).
double distance_traveled(std::span<const GeoPoint> track, double min_step_m = 0.0);
double distance_traveled(const std::vector<GpsSample>& track, double min_step_m = 0.0);

}  // namespace adl::geo
