#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkreg/dataset.hpp"
#include "linkreg/features.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

/// Parses `timestamp,speed_kmh` CSV text. `source` labels error messages.
/// Rows may come in any order; the result is sorted. Every gap between
/// consecutive timestamps must be a positive multiple of `sampling_minutes`
/// and every timestamp must sit on the sampling grid of its day.
SpatialFeature parse_series_csv(std::string_view text, const std::string& name,
                                int sampling_minutes = kDefaultSamplingMinutes, const std::string& source = "<csv>");

SpatialFeature load_series_csv(const std::filesystem::path& path, const std::string& name,
                               int sampling_minutes = kDefaultSamplingMinutes);

/// GeoJSON Feature, FeatureCollection or bare geometry holding exactly one
/// LineString; returns (lat, lon) pairs.
std::vector<LatLon> parse_waypoints_geojson(std::string_view text);
std::vector<LatLon> load_waypoints_geojson(const std::filesystem::path& path);

/// Sorted timestamps present in every series.
std::vector<Timestamp> common_timestamps(const std::vector<const SpatialFeature*>& features);

/// Name uniqueness, dependent presence, independent count, interval and
/// value checks. Throws the first violation found.
void validate(const Dataset& dataset);

/// Inner join on timestamp. Columns are the temporal features followed by the
/// independent spatial features, each in declaration order.
DesignMatrix align(const Dataset& dataset);

/// On-disk description of a dataset: which CSV / GeoJSON files make up each
/// link, which link is dependent, and which temporal features to extract.
struct ManifestLink {
  std::string name;
  std::string series;                    // path relative to the manifest
  std::optional<std::string> waypoints;  // ditto
};

struct Manifest {
  std::string dependent;
  int sampling_minutes = kDefaultSamplingMinutes;
  std::vector<ManifestLink> links;
  std::vector<TemporalRequest> temporal;
};

Manifest parse_manifest(std::string_view json_text);
std::string manifest_to_json(const Manifest& manifest);

/// Reads a manifest and every file it references (relative to the manifest's
/// directory), validates, and extracts the requested temporal features.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Same, but file contents are supplied by a resolver keyed by the manifest's
/// file references. The resolver returns nullopt for missing files.
template <typename Resolver>
Dataset build_dataset(const Manifest& manifest, Resolver&& resolve);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace linkreg

#include "linkreg/ingestion_impl.hpp"
