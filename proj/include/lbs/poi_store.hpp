#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbs/clock.hpp"
#include "lbs/geo.hpp"
#include "lbs/random.hpp"
#include "lbs/spatial_index.hpp"

namespace lbs {

enum class Category { Nature };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view text) noexcept;

inline constexpr std::size_t kMaxNameChars = 200;
inline constexpr std::size_t kMaxDescriptionChars = 5000;

struct Poi {
  std::string id;
  std::string name;
  std::string description;
  Category category = Category::Nature;
  geo::GeoPoint location;
  Timestamp created_at{};
  Timestamp updated_at{};

  friend bool operator==(const Poi&, const Poi&) = default;
};

struct Catalog {
  std::map<std::string, Poi> pois;  // keyed by id
  std::uint64_t revision = 0;

  friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Unvalidated input for a new POI. Coordinates stay raw so that range
/// problems surface as field-level validation errors.
struct PoiDraft {
  std::string name;
  std::string description;
  std::string category = "nature";
  double lat = 0.0;
  double lon = 0.0;
};

/// Partial update; absent fields are left untouched.
struct PoiPatch {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::optional<std::string> category;
  std::optional<double> lat;
  std::optional<double> lon;
};

/// Validates a draft and returns the POI it describes (id and timestamps
/// filled from the arguments). Throws Error{Validation} naming the field.
Poi validate_draft(const PoiDraft& draft, std::string id, Timestamp now);

/// Absent file yields an empty catalog at revision 0. Throws Error{CorruptStore}.
Catalog load_catalog(const std::filesystem::path& path);

/// Atomic replace via a temporary sibling file. Throws Error{IoFailure}.
void persist_catalog(const Catalog& catalog, const std::filesystem::path& path);

/// Sorted by name (byte order), then id.
std::vector<Poi> list_pois(const Catalog& catalog, std::optional<Category> filter = std::nullopt);

SpatialIndex build_index(const Catalog& catalog);

/// Reads the seed/import fixture format (`{"pois": [...]}` without ids or
/// timestamps). Throws Error{CorruptStore} on malformed input.
std::vector<PoiDraft> read_fixture(const std::filesystem::path& path);

namespace detail {
/// First half of persist_catalog: the fully written and synced temp file.
std::filesystem::path write_temp(const Catalog& catalog, const std::filesystem::path& path);
/// Second half: rename over the destination and sync the directory.
void commit_temp(const std::filesystem::path& temp, const std::filesystem::path& path);
}  // namespace detail

/// Catalog plus the spatial index built from it, published as one unit.
struct StoreSnapshot {
  Catalog catalog;
  SpatialIndex index;
};

/// Single-writer, multi-reader POI catalog persisted to one JSON file.
///
/// Every mutation builds a new catalog, persists it, and only then publishes
/// a fresh immutable snapshot. Readers hold a shared_ptr to whichever
/// snapshot was current when they asked and never see partial writes.
class PoiStore {
 public:
  struct Options {
    Clock clock = system_now;
    IdGenerator ids = random_uuid;
  };

  explicit PoiStore(std::filesystem::path path) : PoiStore(std::move(path), Options{}) {}
  PoiStore(std::filesystem::path path, Options options);

  PoiStore(const PoiStore&) = delete;
  PoiStore& operator=(const PoiStore&) = delete;

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  Poi get(const std::string& id) const;
  std::vector<Poi> list(std::optional<Category> filter = std::nullopt) const;

  Poi create(const PoiDraft& draft);
  Poi update(const std::string& id, const PoiPatch& patch);
  void remove(const std::string& id);

  /// Loads the fixture into an empty catalog. Throws Error{AlreadySeeded}.
  void seed(const std::filesystem::path& fixture);
  /// Bulk create from a fixture as a single revision; returns the new POIs.
  std::vector<Poi> import(const std::filesystem::path& fixture);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void commit(Catalog next);
  std::string fresh_id(const Catalog& catalog);

  std::filesystem::path path_;
  Options options_;
  std::mutex writer_;
  mutable std::mutex publish_;
  std::shared_ptr<const StoreSnapshot> current_;
};

}  // namespace lbs
