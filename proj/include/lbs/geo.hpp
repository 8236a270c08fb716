#pragma once

#include <compare>

namespace lbs::geo {

/// Mean Earth radius (IUGG), meters. All distances assume a sphere of this radius.
inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kPi = 3.14159265358979323846;

/// Non-negative, finite length in meters.
class Meters {
 public:
  constexpr Meters() = default;
  /// Throws Error{OutOfRange|NotFinite} on negative or non-finite input.
  explicit Meters(double value);

  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(Meters, Meters) = default;

 private:
  double value_ = 0.0;
};

/// Validated latitude/longitude pair in degrees. Longitude -180 is stored as 180.
class GeoPoint {
 public:
  constexpr GeoPoint() = default;

  constexpr double lat() const noexcept { return lat_; }
  constexpr double lon() const noexcept { return lon_; }

  friend constexpr bool operator==(GeoPoint, GeoPoint) = default;

 private:
  friend GeoPoint make_point(double lat, double lon);
  constexpr GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {}

  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Closed lat/lon rectangle. Boxes never cross the antimeridian.
struct BoundingBox {
  double min_lat = 0.0;
  double max_lat = 0.0;
  double min_lon = 0.0;
  double max_lon = 0.0;
};

GeoPoint make_point(double lat, double lon);

/// Throws Error{OutOfRange} when the bounds are inverted or outside the globe.
BoundingBox make_box(double min_lat, double max_lat, double min_lon, double max_lon);

Meters haversine_distance(GeoPoint a, GeoPoint b) noexcept;

/// Forward azimuth in [0, 360). Throws Error{DegenerateBearing} when a == b
/// or either endpoint is a pole.
double initial_bearing(GeoPoint a, GeoPoint b);

bool contains(const BoundingBox& box, GeoPoint p) noexcept;

constexpr double to_radians(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double to_degrees(double rad) noexcept { return rad * (180.0 / kPi); }

/// Bounding box used to sanity-check the shipped Palembang data.
inline constexpr BoundingBox kPalembangBox{-3.10, -2.85, 104.65, 104.85};

}  // namespace lbs::geo
