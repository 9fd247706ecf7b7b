#pragma once

#include <set>

#include "linkreg/error.hpp"

namespace linkreg {

template <typename Resolver>
Dataset build_dataset(const Manifest& manifest, Resolver&& resolve) {
  if (manifest.sampling_minutes <= 0) {
    throw Error(ErrorCode::NonPositiveInterval, "sampling_minutes must be positive");
  }
  Dataset dataset;
  dataset.dependent_name = manifest.dependent;
  dataset.sampling_minutes = manifest.sampling_minutes;

  std::set<std::string> seen;
  bool has_dependent = false;
  for (const ManifestLink& link : manifest.links) {
    if (!seen.insert(link.name).second) throw Error(ErrorCode::DuplicateName, link.name);
    if (link.name == manifest.dependent) has_dependent = true;
  }
  if (!has_dependent) throw Error(ErrorCode::MissingDependent, "'" + manifest.dependent + "' is not among the links");

  for (const ManifestLink& link : manifest.links) {
    std::optional<std::string> csv = resolve(link.series);
    if (!csv) throw Error(ErrorCode::Io, "missing series file '" + link.series + "' for " + link.name);
    SpatialFeature feature = parse_series_csv(*csv, link.name, manifest.sampling_minutes, link.series);
    if (link.waypoints) {
      std::optional<std::string> geo = resolve(*link.waypoints);
      if (!geo) throw Error(ErrorCode::Io, "missing waypoint file '" + *link.waypoints + "' for " + link.name);
      try {
        feature.waypoints = parse_waypoints_geojson(*geo);
      } catch (const Error& e) {
        throw Error(e.code(), *link.waypoints + ": " + e.detail());
      }
    }
    dataset.spatial.push_back(std::move(feature));
  }
  validate(dataset);
  for (const TemporalRequest& request : manifest.temporal) attach_temporal(dataset, request);
  return dataset;
}

}  // namespace linkreg
