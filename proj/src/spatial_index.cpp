#include "lbs/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lbs/error.hpp"

namespace lbs {

namespace {

constexpr double kCell = SpatialIndex::kCellDegrees;

// Lower bounds are shrunk by this factor so that rounding in haversine can
// never make a pruned entry closer than the bound claimed.
constexpr double kBoundShrink = 1.0 - 1e-9;

double great_circle_from_hav(double h) {
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * geo::kEarthRadiusM * std::asin(std::sqrt(h));
}

std::int64_t chebyshev(std::int64_t dr, std::int64_t dc) {
  return std::max(dr < 0 ? -dr : dr, dc < 0 ? -dc : dc);
}

}  // namespace

bool neighbor_less(const Neighbor& a, const Neighbor& b) noexcept {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id < b.id;
}

std::size_t SpatialIndex::CellKeyHash::operator()(CellKey k) const noexcept {
  const auto r = static_cast<std::uint64_t>(k.row);
  const auto c = static_cast<std::uint64_t>(k.col);
  return std::hash<std::uint64_t>{}(r * 0x9E3779B97F4A7C15ULL ^ c);
}

SpatialIndex SpatialIndex::build(std::vector<IndexEntry> entries) {
  SpatialIndex idx;
  std::unordered_set<std::string> seen;
  seen.reserve(entries.size());
  for (const auto& e : entries) {
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate index id '" + e.id + "'");
    }
  }
  // Canonical order: results never depend on caller ordering.
  std::sort(entries.begin(), entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.id < b.id; });
  idx.entries_ = std::move(entries);
  if (idx.entries_.empty()) return idx;

  geo::BoundingBox ext{90.0, -90.0, 180.0, -180.0};
  for (const auto& e : idx.entries_) {
    ext.min_lat = std::min(ext.min_lat, e.location.lat());
    ext.max_lat = std::max(ext.max_lat, e.location.lat());
    ext.min_lon = std::min(ext.min_lon, e.location.lon());
    ext.max_lon = std::max(ext.max_lon, e.location.lon());
    idx.max_abs_lat_ = std::max(idx.max_abs_lat_, std::fabs(e.location.lat()));
  }
  idx.extent_ = ext;
  idx.origin_lat_ = ext.min_lat;
  idx.origin_lon_ = ext.min_lon;
  for (std::uint32_t i = 0; i < idx.entries_.size(); ++i) {
    idx.cells_[idx.cell_of(idx.entries_[i].location)].push_back(i);
  }
  return idx;
}

SpatialIndex::CellKey SpatialIndex::cell_of(geo::GeoPoint p) const noexcept {
  return CellKey{static_cast<std::int64_t>(std::floor((p.lat() - origin_lat_) / kCell)),
                 static_cast<std::int64_t>(std::floor((p.lon() - origin_lon_) / kCell))};
}

// Smallest distance from `from` to any data point whose longitude differs from
// from.lon() by more than lon_gap_deg (measured along the grid, not wrapped).
double SpatialIndex::lon_gap_bound(geo::GeoPoint from, double lon_gap_deg) const noexcept {
  const double reach = std::max(std::fabs(from.lon() - extent_.min_lon),
                                std::fabs(from.lon() - extent_.max_lon));
  // Beyond 180 degrees of grid separation the angular gap wraps back down.
  const double angular = std::clamp(std::min(lon_gap_deg, 360.0 - reach), 0.0, 180.0);
  const double cos_from = std::cos(geo::to_radians(from.lat()));
  const double cos_data = std::cos(geo::to_radians(max_abs_lat_));
  if (cos_from <= 0.0 || cos_data <= 0.0) return 0.0;
  const double s = std::sin(geo::to_radians(angular) / 2.0);
  return great_circle_from_hav(cos_from * cos_data * s * s);
}

void SpatialIndex::measure_cell(const std::vector<std::uint32_t>& members, geo::GeoPoint from,
                                std::vector<Neighbor>& out) const {
  for (const auto i : members) {
    out.push_back(Neighbor{entries_[i].id, geo::haversine_distance(from, entries_[i].location)});
  }
}

std::vector<Neighbor> SpatialIndex::k_nearest(geo::GeoPoint from, std::size_t k) const {
  std::vector<Neighbor> found;
  if (k == 0 || entries_.empty()) return found;
  k = std::min(k, entries_.size());

  const CellKey q = cell_of(from);
  const CellKey last = cell_of(geo::make_point(extent_.max_lat, extent_.max_lon));
  const std::int64_t max_ring =
      std::max({std::abs(q.row), std::abs(q.row - last.row), std::abs(q.col), std::abs(q.col - last.col)});

  for (std::int64_t r = 0; r <= max_ring; ++r) {
    const std::int64_t ring_cells = r == 0 ? 1 : 8 * r;
    if (static_cast<std::size_t>(ring_cells) > cells_.size()) {
      // Sparse data: cheaper to sweep every occupied cell not yet visited.
      for (const auto& [key, members] : cells_) {
        if (chebyshev(key.row - q.row, key.col - q.col) >= r) measure_cell(members, from, found);
      }
      break;
    }
    const std::int64_t row_lo = std::max<std::int64_t>(q.row - r, 0);
    const std::int64_t row_hi = std::min(q.row + r, last.row);
    for (std::int64_t row = row_lo; row <= row_hi; ++row) {
      const bool edge_row = row == q.row - r || row == q.row + r;
      const std::int64_t step = edge_row || r == 0 ? 1 : 2 * r;
      for (std::int64_t col = q.col - r; col <= q.col + r; col += step) {
        if (col < 0 || col > last.col) continue;
        if (const auto it = cells_.find(CellKey{row, col}); it != cells_.end()) {
          measure_cell(it->second, from, found);
        }
      }
    }
    if (found.size() < k) continue;

    std::nth_element(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(k - 1), found.end(),
                     neighbor_less);
    const double kth = found[k - 1].distance.value();
    // Unvisited cells sit at least r+1 cells away; one cell of slack absorbs
    // the rounding in cell assignment.
    const double gap_deg = static_cast<double>(std::max<std::int64_t>(r - 1, 0)) * kCell;
    const double lat_bound = geo::kEarthRadiusM * geo::to_radians(gap_deg);
    const double bound = std::min(lat_bound, lon_gap_bound(from, gap_deg)) * kBoundShrink;
    if (bound > kth) break;
  }

  std::sort(found.begin(), found.end(), neighbor_less);
  found.resize(std::min(k, found.size()));
  return found;
}

std::vector<Neighbor> SpatialIndex::within_radius(geo::GeoPoint from, geo::Meters radius) const {
  std::vector<Neighbor> found;
  if (entries_.empty()) return found;

  const double angle = radius.value() / geo::kEarthRadiusM;
  const CellKey last = cell_of(geo::make_point(extent_.max_lat, extent_.max_lon));

  const double lat_reach = geo::to_degrees(angle) + kCell;
  std::int64_t row_lo = static_cast<std::int64_t>(std::floor((from.lat() - lat_reach - origin_lat_) / kCell)) - 1;
  std::int64_t row_hi = static_cast<std::int64_t>(std::floor((from.lat() + lat_reach - origin_lat_) / kCell)) + 1;
  row_lo = std::max<std::int64_t>(row_lo, 0);
  row_hi = std::min(row_hi, last.row);

  std::int64_t col_lo = 0;
  std::int64_t col_hi = last.col;
  const double denom = std::cos(geo::to_radians(from.lat())) * std::cos(geo::to_radians(max_abs_lat_));
  const double s = std::sin(angle / 2.0);
  if (angle < geo::kPi && denom > 0.0 && s * s / denom < 1.0) {
    const double lon_reach = geo::to_degrees(2.0 * std::asin(std::sqrt(s * s / denom))) + kCell;
    if (from.lon() - lon_reach >= -180.0 && from.lon() + lon_reach <= 180.0) {
      col_lo = std::max<std::int64_t>(
          static_cast<std::int64_t>(std::floor((from.lon() - lon_reach - origin_lon_) / kCell)) - 1, 0);
      col_hi = std::min(
          static_cast<std::int64_t>(std::floor((from.lon() + lon_reach - origin_lon_) / kCell)) + 1, last.col);
    }
  }

  if (row_lo <= row_hi && col_lo <= col_hi) {
    const auto span_cells = static_cast<double>(row_hi - row_lo + 1) * static_cast<double>(col_hi - col_lo + 1);
    if (span_cells > static_cast<double>(cells_.size())) {
      for (const auto& [key, members] : cells_) {
        if (key.row >= row_lo && key.row <= row_hi && key.col >= col_lo && key.col <= col_hi) {
          measure_cell(members, from, found);
        }
      }
    } else {
      for (std::int64_t row = row_lo; row <= row_hi; ++row) {
        for (std::int64_t col = col_lo; col <= col_hi; ++col) {
          if (const auto it = cells_.find(CellKey{row, col}); it != cells_.end()) {
            measure_cell(it->second, from, found);
          }
        }
      }
    }
  }

  std::erase_if(found, [&](const Neighbor& n) { return n.distance > radius; });
  std::sort(found.begin(), found.end(), neighbor_less);
  return found;
}

}  // namespace lbs
