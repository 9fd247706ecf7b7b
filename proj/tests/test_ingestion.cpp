#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "linkreg/error.hpp"
#include "linkreg/features.hpp"
#include "linkreg/ingestion.hpp"

namespace fs = std::filesystem;
using namespace linkreg;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

const char* kLine = R"({"type":"LineString","coordinates":[[-78.8968,43.9445],[-78.8968,43.9500]]})";

}  // namespace

TEST(Csv, ParsesAndSorts) {
  const auto f = parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:15,20.5\r\n2020-03-01T00:00,21\n\n", "A");
  ASSERT_EQ(f.series.size(), 2u);
  EXPECT_EQ(f.series[0].time.to_string(), "2020-03-01T00:00");
  EXPECT_EQ(f.series[1].speed_kmh, 20.5);
}

TEST(Csv, HandlesByteOrderMark) {
  const auto f = parse_series_csv("\xEF\xBB\xBFtimestamp,speed_kmh\n2020-03-01T00:00,1\n", "A");
  EXPECT_EQ(f.series.size(), 1u);
}

TEST(Csv, ErrorCodes) {
  EXPECT_EQ(code_of([] { parse_series_csv("time,speed\n", "A"); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,abc\n", "A"); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,-1\n", "A"); }), ErrorCode::NegativeSpeed);
  EXPECT_EQ(code_of([] { parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,1\n2020-03-01T00:00,2\n", "A"); }),
            ErrorCode::DuplicateTimestamp);
  EXPECT_EQ(code_of([] { parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,1\n2020-03-01T00:20,2\n", "A"); }),
            ErrorCode::IrregularInterval);
  EXPECT_EQ(code_of([] { parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,1\n", "A", 0); }),
            ErrorCode::NonPositiveInterval);
}

TEST(Csv, NegativeSpeedReportsLine) {
  try {
    parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,1\n2020-03-01T00:15,-3\n", "A", 15, "road.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.detail().find("3"), std::string::npos) << e.detail();
  }
}

TEST(Csv, GapsOnTheGridAreAllowed) {
  const auto f = parse_series_csv("timestamp,speed_kmh\n2020-03-01T00:00,1\n2020-03-01T01:00,2\n", "A");
  EXPECT_EQ(f.series.size(), 2u);
}

TEST(GeoJson, AcceptsFeatureFormsAndSwapsAxes) {
  const std::string bare = kLine;
  const std::string feature = std::string(R"({"type":"Feature","properties":{},"geometry":)") + kLine + "}";
  const std::string collection = R"({"type":"FeatureCollection","features":[)" + feature + "]}";
  for (const auto& text : {bare, feature, collection}) {
    const auto pts = parse_waypoints_geojson(text);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_DOUBLE_EQ(pts[0].lat, 43.9445);
    EXPECT_DOUBLE_EQ(pts[0].lon, -78.8968);
  }
}

TEST(GeoJson, ErrorCodes) {
  EXPECT_EQ(code_of([] { parse_waypoints_geojson(R"({"type":"Point","coordinates":[0,0]})"); }), ErrorCode::NotALineString);
  EXPECT_EQ(code_of([] { parse_waypoints_geojson(R"({"type":"LineString","coordinates":[[0,0]]})"); }),
            ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([] { parse_waypoints_geojson(R"({"type":"LineString","coordinates":[[0,95],[0,0]]})"); }),
            ErrorCode::CoordinateOutOfRange);
}

namespace {

SpatialFeature series(const std::string& name, int start_slot, int count, double base) {
  SpatialFeature f;
  f.name = name;
  const Timestamp t0 = Timestamp::from_civil(2020, 3, 1);
  for (int k = 0; k < count; ++k) {
    f.series.push_back({t0 + std::chrono::minutes(15 * (start_slot + k)), base + k});
  }
  return f;
}

}  // namespace

TEST(Align, InnerJoinWithTemporalColumnsFirst) {
  Dataset ds;
  ds.dependent_name = "Y";
  ds.spatial = {series("Y", 0, 10, 1), series("A", 2, 10, 100), series("B", 0, 8, 200)};
  attach_temporal(ds, {TemporalKind::am, "", {}});
  const DesignMatrix d = align(ds);
  EXPECT_EQ(d.rows(), 6);  // slots 2..7
  EXPECT_EQ(d.columns, (std::vector<std::string>{"AM", "A", "B"}));
  EXPECT_EQ(d.temporal_count(), 1u);
  EXPECT_EQ(d.y(0), 3.0);
  EXPECT_EQ(d.X(0, 1), 100.0);
  EXPECT_EQ(d.X(0, 2), 202.0);
  EXPECT_EQ(d.X(0, 0), 1.0);
}

TEST(Align, EmptyIntersection) {
  Dataset ds;
  ds.dependent_name = "Y";
  ds.spatial = {series("Y", 0, 4, 1), series("A", 10, 4, 1)};
  EXPECT_EQ(code_of([&] { align(ds); }), ErrorCode::EmptyIntersection);
}

TEST(Validate, DatasetRules) {
  Dataset ds;
  ds.dependent_name = "Y";
  ds.spatial = {series("Y", 0, 4, 1)};
  EXPECT_EQ(code_of([&] { validate(ds); }), ErrorCode::InvalidArgument);  // no independent link
  ds.spatial.push_back(series("Y", 0, 4, 1));
  EXPECT_EQ(code_of([&] { validate(ds); }), ErrorCode::DuplicateName);
  ds.spatial.back().name = "A";
  ds.dependent_name = "Z";
  EXPECT_EQ(code_of([&] { validate(ds); }), ErrorCode::MissingDependent);
}

TEST(Manifest, RoundTripsAndLoads) {
  const fs::path dir = fs::temp_directory_path() / "linkreg_manifest_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "y.csv") << "timestamp,speed_kmh\n2020-03-01T00:00,1\n2020-03-01T00:15,2\n";
  std::ofstream(dir / "a.csv") << "timestamp,speed_kmh\n2020-03-01T00:00,3\n2020-03-01T00:15,4\n";
  std::ofstream(dir / "a.geojson") << kLine;
  std::ofstream(dir / "manifest.json")
      << R"({"dependent":"Y","links":[{"name":"Y","series":"y.csv"},{"name":"A","series":"a.csv","waypoints":"a.geojson"}],)"
      << R"("temporal":[{"kind":"explicit_hours","name":"Night","hours":[0,1]}]})";
  const Manifest m = parse_manifest(read_text_file(dir / "manifest.json"));
  EXPECT_EQ(parse_manifest(manifest_to_json(m)).links.size(), 2u);
  const Dataset ds = load_dataset(dir / "manifest.json");
  EXPECT_EQ(ds.dependent_name, "Y");
  ASSERT_EQ(ds.temporal.size(), 1u);
  EXPECT_EQ(ds.temporal[0].name, "Night");
  EXPECT_EQ(ds.find_spatial("A")->waypoints.size(), 2u);

  std::ofstream(dir / "manifest.json") << R"({"dependent":"Y","links":[{"name":"Y","series":"gone.csv"},)"
                                       << R"({"name":"A","series":"a.csv"}]})";
  try {
    load_dataset(dir / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gone.csv"), std::string::npos);
  }
  fs::remove_all(dir);
}
