#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "lbs/error.hpp"
#include "lbs/geo.hpp"

using namespace lbs;
using namespace lbs::geo;
using lbs::testing::oracle_bearing;
using lbs::testing::oracle_chord_distance;
using lbs::testing::oracle_haversine;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected lbs::Error");
  return ErrorCode::NotFound;
}

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  return make_point(lat(rng), lon(rng));
}

}  // namespace

TEST_CASE("make_point validates and canonicalizes") {
  const GeoPoint origin = make_point(0, 0);
  CHECK(origin.lat() == 0.0);
  CHECK(origin.lon() == 0.0);

  const GeoPoint west = make_point(0, -180);
  CHECK(west.lon() == 180.0);
  CHECK(west == make_point(0, 180));

  CHECK(code_of([] { make_point(91, 0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { make_point(-90.0000001, 0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { make_point(0, 180.5); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { make_point(std::nan(""), 0); }) == ErrorCode::NotFinite);
  CHECK(code_of([] { make_point(0, INFINITY); }) == ErrorCode::NotFinite);

  CHECK(make_point(90, 180).lat() == 90.0);
  CHECK(std::signbit(make_point(-0.0, -0.0).lat()) == false);
}

TEST_CASE("Meters rejects negative and non-finite lengths") {
  CHECK(Meters(0.0).value() == 0.0);
  CHECK(code_of([] { Meters(-1.0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { Meters(NAN); }) == ErrorCode::NotFinite);
}

TEST_CASE("haversine reference values") {
  const GeoPoint a = make_point(-2.99, 104.76);
  CHECK(haversine_distance(a, a).value() == 0.0);

  // half circumference: pi * R
  CHECK(haversine_distance(make_point(0, 0), make_point(0, 180)).value() ==
        doctest::Approx(kPi * kEarthRadiusM).epsilon(1e-6));
  // one degree of equator: R * (pi / 180)
  CHECK(haversine_distance(make_point(0, 0), make_point(0, 1)).value() ==
        doctest::Approx(kEarthRadiusM * kPi / 180.0).epsilon(1e-6));
  CHECK(haversine_distance(make_point(0, 0), make_point(0, 1)).value() == doctest::Approx(111195.0802335329).epsilon(1e-9));

  // Palembang pair; frozen from a 40-digit chord-length computation.
  const GeoPoint b = make_point(-2.95, 104.80);
  const double d = haversine_distance(a, b).value();
  CHECK(d == doctest::Approx(6285.920518908553).epsilon(1e-6));
  CHECK(d == doctest::Approx(oracle_haversine(-2.99, 104.76, -2.95, 104.80)).epsilon(1e-6));
}

TEST_CASE("initial bearing") {
  CHECK(initial_bearing(make_point(0, 0), make_point(0, 90)) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(initial_bearing(make_point(0, 0), make_point(45, 0)) == doctest::Approx(0.0));
  // frozen from the tangent-vector oracle evaluated at 40 digits
  CHECK(initial_bearing(make_point(10, 20), make_point(-5, 40)) == doctest::Approx(126.09234877696524).epsilon(1e-9));
  CHECK(std::fabs(initial_bearing(make_point(10, 20), make_point(-5, 40)) - oracle_bearing(10, 20, -5, 40)) < 1e-6);
  CHECK(initial_bearing(make_point(0, 10), make_point(0, 0)) == doctest::Approx(270.0));

  CHECK(code_of([] { initial_bearing(make_point(1, 1), make_point(1, 1)); }) == ErrorCode::DegenerateBearing);
  CHECK(code_of([] { initial_bearing(make_point(90, 0), make_point(1, 1)); }) == ErrorCode::DegenerateBearing);
  CHECK(code_of([] { initial_bearing(make_point(1, 1), make_point(-90, 0)); }) == ErrorCode::DegenerateBearing);
}

TEST_CASE("bounding box containment") {
  CHECK(contains(kPalembangBox, make_point(-2.99, 104.76)));
  CHECK(contains(kPalembangBox, make_point(-3.10, 104.65)));
  CHECK(contains(kPalembangBox, make_point(-2.85, 104.85)));
  CHECK_FALSE(contains(kPalembangBox, make_point(0, 0)));
  CHECK_FALSE(contains(kPalembangBox, make_point(-2.99, 104.851)));

  CHECK(code_of([] { make_box(1, 0, 0, 1); }) == ErrorCode::OutOfRange);
  const BoundingBox box = make_box(-1, 1, -180, 180);
  CHECK(contains(box, make_point(0, -180)));
}

TEST_CASE("geodesy properties over random pairs") {
  std::mt19937_64 rng(0x5eed);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint a = random_point(rng);
    const GeoPoint b = random_point(rng);
    const GeoPoint c = random_point(rng);
    const double ab = haversine_distance(a, b).value();
    REQUIRE(ab == haversine_distance(b, a).value());
    REQUIRE(ab <= kPi * kEarthRadiusM);
    REQUIRE(haversine_distance(a, a).value() == 0.0);
    REQUIRE(haversine_distance(a, c).value() <= ab + haversine_distance(b, c).value() + 1e-6);
    REQUIRE(ab == doctest::Approx(oracle_chord_distance(a.lat(), a.lon(), b.lat(), b.lon())).epsilon(1e-6).scale(1.0));
    if (std::fabs(a.lat()) < 90.0 && std::fabs(b.lat()) < 90.0 && !(a == b)) {
      const double br = initial_bearing(a, b);
      REQUIRE(br >= 0.0);
      REQUIRE(br < 360.0);
    }
  }
}

TEST_CASE("meridian distance does not depend on longitude") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 500; ++i) {
    const double l1 = lat(rng), l2 = lat(rng);
    const double ref = haversine_distance(make_point(l1, 0), make_point(l2, 0)).value();
    const double x = lon(rng);
    CHECK(haversine_distance(make_point(l1, x), make_point(l2, x)).value() == doctest::Approx(ref).epsilon(1e-9));
  }
}
