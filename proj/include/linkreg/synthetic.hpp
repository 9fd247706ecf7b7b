#pragma once

#include <cstdint>
#include <filesystem>

#include "linkreg/dataset.hpp"
#include "linkreg/ingestion.hpp"

namespace linkreg {

/// Generator for the bundled four-link example: three inbound links with a
/// daily congestion cycle and an outbound link that is a noisy linear
/// function of them and of the AM / peak-hour indicators.
struct FourLinkScenario {
  std::uint64_t seed = 20200301;
  Timestamp start = Timestamp::from_civil(2020, 3, 1);
  int days = 7;
  int sampling_minutes = kDefaultSamplingMinutes;
  double noise_sd = 1.3;          // outbound link noise, km/h
  double inbound_noise_sd = 1.0;  // inbound link noise, km/h
  HourSet peak_hours = HourSet(0x7FFE00);  // hours 9..22

  // outbound = intercept + am * AM + peak * Peakhour + inbound . speeds + noise
  double intercept = 7.4;
  double am = 1.75;
  double peak = -2.75;
  double inbound[3] = {-0.05, -0.05, 0.71};
};

/// Links Road1 (dependent) .. Road4 with waypoints; no temporal features.
Dataset generate_four_link(const FourLinkScenario& scenario = {});

/// Writes one CSV and one GeoJSON per link plus `manifest.json`, which
/// requests Peakhour and AM extraction.
Manifest write_dataset_files(const Dataset& dataset, const std::filesystem::path& dir,
                             const std::vector<TemporalRequest>& temporal);

std::string series_to_csv(const SpatialFeature& feature);
std::string waypoints_to_geojson(const SpatialFeature& feature);

}  // namespace linkreg
