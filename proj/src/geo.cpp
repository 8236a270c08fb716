#include "lbs/geo.hpp"

#include <cmath>
#include <string>

#include "lbs/error.hpp"

namespace lbs::geo {

Meters::Meters(double value) : value_(value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NotFinite, "distance must be finite");
  }
  if (value < 0.0) {
    throw Error(ErrorCode::OutOfRange, "distance must be non-negative");
  }
}

GeoPoint make_point(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw Error(ErrorCode::NotFinite, "latitude and longitude must be finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::OutOfRange, "latitude " + std::to_string(lat) + " outside [-90, 90]");
  }
  if (lon < -180.0 || lon > 180.0) {
    throw Error(ErrorCode::OutOfRange, "longitude " + std::to_string(lon) + " outside [-180, 180]");
  }
  if (lon == -180.0) lon = 180.0;
  // -0.0 compares equal to 0.0 but serializes differently
  if (lat == 0.0) lat = 0.0;
  if (lon == 0.0) lon = 0.0;
  return GeoPoint(lat, lon);
}

BoundingBox make_box(double min_lat, double max_lat, double min_lon, double max_lon) {
  const GeoPoint lo = make_point(min_lat, min_lon);
  const GeoPoint hi = make_point(max_lat, max_lon);
  if (min_lat > max_lat || min_lon > max_lon) {
    throw Error(ErrorCode::OutOfRange, "bounding box minimum exceeds maximum");
  }
  // make_point folds -180 to 180; a box edge keeps the caller's value.
  return BoundingBox{lo.lat(), hi.lat(), min_lon, max_lon};
}

Meters haversine_distance(GeoPoint a, GeoPoint b) noexcept {
  const double phi1 = to_radians(a.lat());
  const double phi2 = to_radians(b.lat());
  // Absolute differences and a commutative product keep d(a,b) == d(b,a) bit for bit.
  const double sin_dphi = std::sin(std::fabs(phi2 - phi1) / 2.0);
  const double sin_dlam = std::sin(std::fabs(to_radians(b.lon()) - to_radians(a.lon())) / 2.0);
  double h = sin_dphi * sin_dphi + (std::cos(phi1) * std::cos(phi2)) * (sin_dlam * sin_dlam);
  if (h > 1.0) h = 1.0;
  return Meters(2.0 * kEarthRadiusM * std::asin(std::sqrt(h)));
}

double initial_bearing(GeoPoint a, GeoPoint b) {
  if (a == b) {
    throw Error(ErrorCode::DegenerateBearing, "bearing undefined between identical points");
  }
  if (std::fabs(a.lat()) == 90.0 || std::fabs(b.lat()) == 90.0) {
    throw Error(ErrorCode::DegenerateBearing, "bearing undefined at a pole");
  }
  const double phi1 = to_radians(a.lat());
  const double phi2 = to_radians(b.lat());
  const double dlam = to_radians(b.lon() - a.lon());
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  double deg = std::fmod(to_degrees(std::atan2(y, x)) + 360.0, 360.0);
  if (deg >= 360.0 || deg < 0.0) deg = 0.0;
  return deg;
}

bool contains(const BoundingBox& box, GeoPoint p) noexcept {
  return box.min_lat <= p.lat() && p.lat() <= box.max_lat &&
         box.min_lon <= p.lon() && p.lon() <= box.max_lon;
}

}  // namespace lbs::geo
