#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lbs/geo.hpp"

namespace lbs {

struct IndexEntry {
  std::string id;
  geo::GeoPoint location;
};

struct Neighbor {
  std::string id;
  geo::Meters distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Immutable uniform lat/lon grid over a set of located ids.
///
/// Results are ordered by (distance, id) and are identical to a brute-force
/// scan over all entries; the grid only decides which entries get measured.
class SpatialIndex {
 public:
  static constexpr double kCellDegrees = 0.01;

  SpatialIndex() = default;

  /// Throws Error{DuplicateId} if two entries share an id.
  static SpatialIndex build(std::vector<IndexEntry> entries);

  std::vector<Neighbor> k_nearest(geo::GeoPoint from, std::size_t k) const;
  std::vector<Neighbor> within_radius(geo::GeoPoint from, geo::Meters radius) const;

  std::span<const IndexEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  struct CellKey {
    std::int64_t row;
    std::int64_t col;
    friend bool operator==(CellKey, CellKey) = default;
  };
  struct CellKeyHash {
    std::size_t operator()(CellKey k) const noexcept;
  };

  CellKey cell_of(geo::GeoPoint p) const noexcept;
  double lon_gap_bound(geo::GeoPoint from, double lon_gap_deg) const noexcept;
  void measure_cell(const std::vector<std::uint32_t>& members, geo::GeoPoint from,
                    std::vector<Neighbor>& out) const;

  std::vector<IndexEntry> entries_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells_;
  geo::BoundingBox extent_{};
  double origin_lat_ = 0.0;
  double origin_lon_ = 0.0;
  // max |lat| over the data; bounds cos(lat) from below for longitude pruning
  double max_abs_lat_ = 0.0;
};

/// (distance, id) ordering shared by every neighbor query.
bool neighbor_less(const Neighbor& a, const Neighbor& b) noexcept;

}  // namespace lbs
