#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lbs/geo.hpp"
#include "lbs/spatial_index.hpp"

namespace lbs {

/// Endpoints farther than this from every graph node fall back to a straight line.
inline constexpr double kSnapMaxM = 500.0;
inline constexpr double kWalkingSpeedMps = 1.4;
inline constexpr double kDrivingSpeedMps = 8.33;

enum class TravelMode { Walking, Driving };
enum class RouteKind { Graph, StraightLine };

std::string_view to_string(TravelMode m) noexcept;
std::string_view to_string(RouteKind k) noexcept;
std::optional<TravelMode> parse_travel_mode(std::string_view text) noexcept;
std::optional<RouteKind> parse_route_kind(std::string_view text) noexcept;

struct GraphNode {
  std::string id;
  geo::GeoPoint location;
};

/// Edge as written in the graph file. A missing weight means "use the
/// great-circle length of the edge".
struct GraphEdge {
  std::string from;
  std::string to;
  bool bidirectional = true;
  std::optional<double> weight_m;
};

/// Immutable directed road graph. Node indices follow ascending id order, so
/// comparing indices compares ids.
class RoadGraph {
 public:
  struct Arc {
    std::size_t to;
    double weight_m;
  };

  RoadGraph() = default;

  /// Validates and expands bidirectional edges. Throws Error{CorruptGraph}.
  static RoadGraph make(std::vector<GraphNode> nodes, const std::vector<GraphEdge>& edges);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t arc_count() const noexcept;
  const GraphNode& node(std::size_t index) const { return nodes_.at(index); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::span<const Arc> arcs_from(std::size_t index) const { return adjacency_.at(index); }
  const SpatialIndex& node_index() const noexcept { return node_index_; }

 private:
  std::vector<GraphNode> nodes_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::vector<Arc>> adjacency_;
  SpatialIndex node_index_;
};

/// Reads the `{"nodes": [...], "edges": [...]}` graph file. Throws Error{CorruptGraph}.
RoadGraph load_graph(const std::filesystem::path& path);

struct PathResult {
  std::vector<std::string> nodes;
  geo::Meters weight;
};

/// Dijkstra; among equal-weight optima returns the lexicographically smallest
/// node-id sequence. Throws Error{NotFound} for unknown ids, Error{NoPath}.
PathResult shortest_path(const RoadGraph& graph, std::string_view src, std::string_view dst);

struct RouteResult {
  std::vector<geo::GeoPoint> polyline;
  geo::Meters distance;
  double duration_s = 0.0;
  TravelMode mode = TravelMode::Walking;
  RouteKind kind = RouteKind::StraightLine;

  friend bool operator==(const RouteResult&, const RouteResult&) = default;
};

double estimate_duration(geo::Meters distance, TravelMode mode) noexcept;

/// Road route between two arbitrary points, snapping each to its nearest node.
/// Falls back to the great-circle segment when a snap exceeds kSnapMaxM or no
/// path exists; never throws for valid points.
RouteResult route(const RoadGraph& graph, geo::GeoPoint from, geo::GeoPoint to, TravelMode mode);

}  // namespace lbs
