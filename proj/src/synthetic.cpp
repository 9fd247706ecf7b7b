#include "linkreg/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "linkreg/error.hpp"
#include "linkreg/serialize.hpp"

namespace linkreg {

namespace {

struct InboundProfile {
  const char* name;
  double free_flow;
  double congested;
  std::vector<LatLon> waypoints;
};

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Dataset generate_four_link(const FourLinkScenario& scenario) {
  if (scenario.sampling_minutes <= 0 || scenario.days <= 0) {
    throw Error(ErrorCode::InvalidArgument, "scenario needs positive days and sampling interval");
  }
  // Simcoe St N / Conlin Rd, Oshawa. Road1 leaves the intersection northbound;
  // Road2..4 arrive from the south, east and west.
  const LatLon junction{43.94450, -78.89680};
  const std::vector<InboundProfile> inbound = {
      {"Road2", 24.0, 9.0, {{43.93700, -78.89600}, {43.94080, -78.89640}, junction}},
      {"Road3", 14.0, 5.0, {{43.94500, -78.88500}, {43.94470, -78.89100}, junction}},
      {"Road4", 20.0, 7.0, {{43.94400, -78.90900}, {43.94430, -78.90300}, junction}},
  };

  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> inbound_noise(0.0, scenario.inbound_noise_sd);
  std::normal_distribution<double> outbound_noise(0.0, scenario.noise_sd);

  Dataset dataset;
  dataset.dependent_name = "Road1";
  dataset.sampling_minutes = scenario.sampling_minutes;
  SpatialFeature road1{"Road1", {}, {junction, {43.94820, -78.89720}, {43.95200, -78.89750}}};
  std::vector<SpatialFeature> links;
  for (const auto& p : inbound) links.push_back({p.name, {}, p.waypoints});

  const int steps = scenario.days * 24 * 60 / scenario.sampling_minutes;
  for (int i = 0; i < steps; ++i) {
    const Timestamp t = scenario.start + std::chrono::minutes(i * scenario.sampling_minutes);
    const bool peak = scenario.peak_hours.test(static_cast<std::size_t>(t.hour()));
    const bool am = t.hour() < 12;
    double outbound = scenario.intercept + (am ? scenario.am : 0.0) + (peak ? scenario.peak : 0.0);
    for (std::size_t k = 0; k < inbound.size(); ++k) {
      const double mean = peak ? inbound[k].congested : inbound[k].free_flow;
      const double speed = round_cents(std::max(0.5, mean + inbound_noise(rng)));
      links[k].series.push_back({t, speed});
      outbound += scenario.inbound[k] * speed;
    }
    road1.series.push_back({t, round_cents(std::max(0.0, outbound + outbound_noise(rng)))});
  }

  dataset.spatial.push_back(std::move(road1));
  for (auto& l : links) dataset.spatial.push_back(std::move(l));
  return dataset;
}

std::string series_to_csv(const SpatialFeature& feature) {
  std::string out = "timestamp,speed_kmh\n";
  for (const auto& s : feature.series) out += s.time.to_string() + "," + format_double(s.speed_kmh) + "\n";
  return out;
}

std::string waypoints_to_geojson(const SpatialFeature& feature) {
  Json coords = Json::array();
  for (const auto& p : feature.waypoints) coords.push_back(Json::array({p.lon, p.lat}));
  Json doc{{"type", "Feature"},
           {"properties", {{"name", feature.name}}},
           {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
  return doc.dump(2) + "\n";
}

Manifest write_dataset_files(const Dataset& dataset, const std::filesystem::path& dir,
                             const std::vector<TemporalRequest>& temporal) {
  std::filesystem::create_directories(dir);
  Manifest manifest;
  manifest.dependent = dataset.dependent_name;
  manifest.sampling_minutes = dataset.sampling_minutes;
  manifest.temporal = temporal;
  for (const auto& f : dataset.spatial) {
    ManifestLink link;
    link.name = f.name;
    link.series = lowercase(f.name) + ".csv";
    write_file(dir / link.series, series_to_csv(f));
    if (!f.waypoints.empty()) {
      link.waypoints = lowercase(f.name) + ".geojson";
      write_file(dir / *link.waypoints, waypoints_to_geojson(f));
    }
    manifest.links.push_back(std::move(link));
  }
  write_file(dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

}  // namespace linkreg
