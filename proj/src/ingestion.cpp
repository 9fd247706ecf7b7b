#include "linkreg/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "linkreg/error.hpp"
#include "linkreg/serialize.hpp"

namespace linkreg {

const SpatialFeature* Dataset::find_spatial(std::string_view name) const {
  for (const auto& f : spatial) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::vector<const SpatialFeature*> Dataset::independents() const {
  std::vector<const SpatialFeature*> out;
  for (const auto& f : spatial) {
    if (f.name != dependent_name) out.push_back(&f);
  }
  return out;
}

std::vector<const SpatialFeature*> Dataset::all_spatial() const {
  std::vector<const SpatialFeature*> out;
  for (const auto& f : spatial) out.push_back(&f);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line); }

void check_grid(const std::vector<SpeedSample>& series, int sampling_minutes, const std::string& label) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].time.minute_of_day() % sampling_minutes != 0) {
      throw Error(ErrorCode::IrregularInterval,
                  label + ": " + series[i].time.to_string() + " is off the " + std::to_string(sampling_minutes) + "-minute grid");
    }
    if (i == 0) continue;
    const auto gap = (series[i].time - series[i - 1].time).count();
    if (gap == 0) throw Error(ErrorCode::DuplicateTimestamp, label + ": " + series[i].time.to_string());
    if (gap < 0) {
      throw Error(ErrorCode::InvalidArgument, label + ": timestamps not increasing at " + series[i].time.to_string());
    }
    if (gap % sampling_minutes != 0) {
      throw Error(ErrorCode::IrregularInterval,
                  label + ": gap of " + std::to_string(gap) + " min before " + series[i].time.to_string());
    }
  }
}

}  // namespace

SpatialFeature parse_series_csv(std::string_view text, const std::string& name, int sampling_minutes,
                                const std::string& source) {
  if (sampling_minutes <= 0) throw Error(ErrorCode::NonPositiveInterval, std::to_string(sampling_minutes));
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  struct Row {
    SpeedSample sample;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!header_seen) {
      if (line != "timestamp,speed_kmh") {
        throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": expected header 'timestamp,speed_kmh'");
      }
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": expected two fields");
    }
    auto time = Timestamp::parse_iso(trim(line.substr(0, comma)));
    if (!time) throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": bad timestamp");
    const std::string_view speed_text = trim(line.substr(comma + 1));
    double speed = 0.0;
    auto res = std::from_chars(speed_text.data(), speed_text.data() + speed_text.size(), speed);
    if (res.ec != std::errc{} || res.ptr != speed_text.data() + speed_text.size() || !std::isfinite(speed)) {
      throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": bad speed");
    }
    if (speed < 0.0) throw Error(ErrorCode::NegativeSpeed, where(source, line_no));
    rows.push_back({{*time, speed}, line_no});
    if (end == text.size()) break;
  }
  if (!header_seen) throw Error(ErrorCode::MalformedRow, where(source, 1) + ": missing header");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.sample.time < b.sample.time; });
  SpatialFeature feature;
  feature.name = name;
  feature.series.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].sample.time == rows[i - 1].sample.time) {
      throw Error(ErrorCode::DuplicateTimestamp,
                  where(source, rows[i].line) + ": " + rows[i].sample.time.to_string());
    }
    feature.series.push_back(rows[i].sample);
  }
  check_grid(feature.series, sampling_minutes, source);
  return feature;
}

SpatialFeature load_series_csv(const std::filesystem::path& path, const std::string& name, int sampling_minutes) {
  return parse_series_csv(read_text_file(path), name, sampling_minutes, path.string());
}

namespace {

std::vector<LatLon> line_coordinates(const Json& geometry) {
  std::vector<LatLon> out;
  for (const Json& c : geometry.at("coordinates")) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw Error(ErrorCode::NotALineString, "coordinates must be [lon, lat] number pairs");
    }
    const double lon = c[0].get<double>();
    const double lat = c[1].get<double>();
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
      throw Error(ErrorCode::CoordinateOutOfRange, "[" + std::to_string(lon) + ", " + std::to_string(lat) + "]");
    }
    out.push_back({lat, lon});
  }
  return out;
}

bool is_line_string(const Json& geometry) {
  return geometry.is_object() && geometry.value("type", std::string{}) == "LineString" && geometry.contains("coordinates") &&
         geometry.at("coordinates").is_array();
}

}  // namespace

std::vector<LatLon> parse_waypoints_geojson(std::string_view text) {
  const Json doc = parse_json(text, "geojson");
  if (!doc.is_object()) throw Error(ErrorCode::NotALineString, "document is not a GeoJSON object");

  std::vector<const Json*> lines;
  const std::string type = doc.value("type", std::string{});
  if (type == "FeatureCollection") {
    if (!doc.contains("features") || !doc.at("features").is_array()) {
      throw Error(ErrorCode::NotALineString, "FeatureCollection without a features array");
    }
    for (const Json& feature : doc.at("features")) {
      if (feature.contains("geometry") && is_line_string(feature.at("geometry"))) lines.push_back(&feature.at("geometry"));
    }
  } else if (type == "Feature") {
    if (doc.contains("geometry") && is_line_string(doc.at("geometry"))) lines.push_back(&doc.at("geometry"));
  } else if (is_line_string(doc)) {
    lines.push_back(&doc);
  }
  if (lines.size() != 1) {
    throw Error(ErrorCode::NotALineString, "expected exactly one LineString, found " + std::to_string(lines.size()));
  }
  try {
    std::vector<LatLon> points = line_coordinates(*lines.front());
    if (points.size() < 2) throw Error(ErrorCode::TooFewPoints, std::to_string(points.size()) + " point(s)");
    return points;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::NotALineString, e.what());
  }
}

std::vector<LatLon> load_waypoints_geojson(const std::filesystem::path& path) {
  try {
    return parse_waypoints_geojson(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<Timestamp> common_timestamps(const std::vector<const SpatialFeature*>& features) {
  if (features.empty()) return {};
  std::vector<Timestamp> shared;
  for (const auto& s : features.front()->series) shared.push_back(s.time);
  std::sort(shared.begin(), shared.end());
  for (std::size_t k = 1; k < features.size(); ++k) {
    std::vector<Timestamp> other;
    for (const auto& s : features[k]->series) other.push_back(s.time);
    std::sort(other.begin(), other.end());
    std::vector<Timestamp> next;
    std::set_intersection(shared.begin(), shared.end(), other.begin(), other.end(), std::back_inserter(next));
    shared = std::move(next);
  }
  shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
  return shared;
}

void validate(const Dataset& dataset) {
  if (dataset.sampling_minutes <= 0) throw Error(ErrorCode::NonPositiveInterval, std::to_string(dataset.sampling_minutes));
  std::set<std::string> names;
  for (const auto& f : dataset.spatial) {
    if (f.name.empty()) throw Error(ErrorCode::InvalidArgument, "link with empty name");
    if (!names.insert(f.name).second) throw Error(ErrorCode::DuplicateName, f.name);
  }
  for (const auto& t : dataset.temporal) {
    if (!names.insert(t.name).second) throw Error(ErrorCode::DuplicateName, t.name);
    for (const auto& v : t.values) {
      if (v.indicator != 0 && v.indicator != 1) throw Error(ErrorCode::InvalidArgument, t.name + " indicator not in {0,1}");
    }
  }
  if (!dataset.find_spatial(dataset.dependent_name)) {
    throw Error(ErrorCode::MissingDependent, "'" + dataset.dependent_name + "' is not among the links");
  }
  if (dataset.independents().empty()) throw Error(ErrorCode::InvalidArgument, "at least one independent link is required");

  for (const auto& f : dataset.spatial) {
    if (!std::is_sorted(f.series.begin(), f.series.end(), [](auto& a, auto& b) { return a.time < b.time; })) {
      throw Error(ErrorCode::InvalidArgument, f.name + ": series not sorted");
    }
    for (const auto& s : f.series) {
      if (!std::isfinite(s.speed_kmh)) throw Error(ErrorCode::InvalidArgument, f.name + ": non-finite speed");
      if (s.speed_kmh < 0.0) throw Error(ErrorCode::NegativeSpeed, f.name + " at " + s.time.to_string());
    }
    check_grid(f.series, dataset.sampling_minutes, f.name);
    if (!f.waypoints.empty()) {
      if (f.waypoints.size() < 2) throw Error(ErrorCode::TooFewPoints, f.name);
      for (const auto& p : f.waypoints) {
        if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
          throw Error(ErrorCode::CoordinateOutOfRange, f.name);
        }
      }
    }
  }
}

DesignMatrix align(const Dataset& dataset) {
  validate(dataset);
  const std::vector<const SpatialFeature*> independents = dataset.independents();
  const SpatialFeature* dependent = dataset.find_spatial(dataset.dependent_name);

  std::vector<const SpatialFeature*> all = independents;
  all.push_back(dependent);
  std::vector<Timestamp> shared = common_timestamps(all);
  for (const TemporalFeature& t : dataset.temporal) {
    std::vector<Timestamp> times;
    for (const auto& v : t.values) times.push_back(v.time);
    std::sort(times.begin(), times.end());
    std::vector<Timestamp> next;
    std::set_intersection(shared.begin(), shared.end(), times.begin(), times.end(), std::back_inserter(next));
    shared = std::move(next);
  }
  if (shared.empty()) throw Error(ErrorCode::EmptyIntersection, "series share no timestamps");

  const auto n = static_cast<Eigen::Index>(shared.size());
  const auto p = static_cast<Eigen::Index>(dataset.temporal.size() + independents.size());
  DesignMatrix design;
  design.dependent_name = dataset.dependent_name;
  design.sampling_minutes = dataset.sampling_minutes;
  design.timestamps = shared;
  design.X.resize(n, p);
  design.y.resize(n);

  auto fill = [&](Eigen::Index col, const auto& samples, auto value_of) {
    std::map<Timestamp, double> lookup;
    for (const auto& s : samples) lookup.emplace(s.time, value_of(s));
    for (Eigen::Index r = 0; r < n; ++r) design.X(r, col) = lookup.at(shared[static_cast<std::size_t>(r)]);
  };

  Eigen::Index col = 0;
  for (const TemporalFeature& t : dataset.temporal) {
    design.columns.push_back(t.name);
    design.temporal_rules.push_back(t.definition);
    fill(col++, t.values, [](const IndicatorSample& s) { return static_cast<double>(s.indicator); });
  }
  for (const SpatialFeature* f : independents) {
    design.columns.push_back(f->name);
    fill(col++, f->series, [](const SpeedSample& s) { return s.speed_kmh; });
  }
  std::map<Timestamp, double> dep;
  for (const auto& s : dependent->series) dep.emplace(s.time, s.speed_kmh);
  for (Eigen::Index r = 0; r < n; ++r) design.y(r) = dep.at(shared[static_cast<std::size_t>(r)]);
  return design;
}

Manifest parse_manifest(std::string_view json_text) {
  const Json j = parse_json(json_text, "manifest");
  Manifest m;
  try {
    m.dependent = j.at("dependent").get<std::string>();
    m.sampling_minutes = j.value("sampling_minutes", kDefaultSamplingMinutes);
    for (const Json& link : j.at("links")) {
      ManifestLink l;
      l.name = link.at("name").get<std::string>();
      l.series = link.at("series").get<std::string>();
      if (link.contains("waypoints") && !link.at("waypoints").is_null()) l.waypoints = link.at("waypoints").get<std::string>();
      m.links.push_back(std::move(l));
    }
    for (const Json& t : j.value("temporal", Json::array())) m.temporal.push_back(t.get<TemporalRequest>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("manifest: ") + e.what());
  }
  return m;
}

std::string manifest_to_json(const Manifest& manifest) {
  Json links = Json::array();
  for (const auto& l : manifest.links) {
    Json link{{"name", l.name}, {"series", l.series}};
    if (l.waypoints) link["waypoints"] = *l.waypoints;
    links.push_back(std::move(link));
  }
  Json j{{"dependent", manifest.dependent},
         {"sampling_minutes", manifest.sampling_minutes},
         {"links", links},
         {"temporal", manifest.temporal}};
  return j.dump(2) + "\n";
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const Manifest manifest = parse_manifest(read_text_file(manifest_path));
  const std::filesystem::path base = manifest_path.parent_path();
  return build_dataset(manifest, [&](const std::string& ref) -> std::optional<std::string> {
    const std::filesystem::path p = base / ref;
    if (!std::filesystem::is_regular_file(p)) return std::nullopt;
    return read_text_file(p);
  });
}

}  // namespace linkreg
