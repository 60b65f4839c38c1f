#pragma once

namespace athn {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  bool operator==(const GeoPoint&) const = default;
};

bool is_valid(const GeoPoint& p);

// Throws Errc::invalid_argument when the point is not finite or out of range.
void validate(const GeoPoint& p);

// Great-circle distance in km.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

}  // namespace athn
