#include "linkreg/serialize.hpp"

#include "linkreg/error.hpp"
#include "linkreg/model_io.hpp"

namespace linkreg {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index expected_cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), expected_cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != expected_cols) {
      throw Error(ErrorCode::InvalidArgument, "matrix row " + std::to_string(r) + " has the wrong width");
    }
    for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

}  // namespace

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": " + e.what());
  }
}

void to_json(Json& j, const Timestamp& t) { j = t.to_string(); }

void from_json(const Json& j, Timestamp& t) {
  auto parsed = Timestamp::parse_flexible(j.get<std::string>());
  if (!parsed) throw Error(ErrorCode::InvalidArgument, "bad timestamp '" + j.get<std::string>() + "'");
  t = *parsed;
}

void to_json(Json& j, const LatLon& p) { j = Json::array({p.lat, p.lon}); }

void from_json(const Json& j, LatLon& p) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "waypoint must be [lat, lon]");
  p.lat = j[0].get<double>();
  p.lon = j[1].get<double>();
}

void to_json(Json& j, const SpeedSample& s) { j = Json::array({s.time.to_string(), s.speed_kmh}); }

void from_json(const Json& j, SpeedSample& s) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "sample must be [timestamp, speed]");
  s.time = j[0].get<Timestamp>();
  s.speed_kmh = j[1].get<double>();
}

void to_json(Json& j, const SpatialFeature& f) {
  j = Json{{"name", f.name}, {"series", f.series}, {"waypoints", f.waypoints}};
}

void from_json(const Json& j, SpatialFeature& f) {
  f.name = j.at("name").get<std::string>();
  f.series = j.at("series").get<std::vector<SpeedSample>>();
  f.waypoints = j.value("waypoints", Json::array()).get<std::vector<LatLon>>();
}

Json hours_to_json(const HourSet& hours) {
  Json out = Json::array();
  for (std::size_t h = 0; h < hours.size(); ++h) {
    if (hours.test(h)) out.push_back(static_cast<int>(h));
  }
  return out;
}

HourSet hours_from_json(const Json& j) {
  HourSet hours;
  for (const Json& h : j) {
    const int hour = h.get<int>();
    if (hour < 0 || hour > 23) throw Error(ErrorCode::InvalidArgument, "hour out of range: " + std::to_string(hour));
    hours.set(static_cast<std::size_t>(hour));
  }
  return hours;
}

void to_json(Json& j, const TemporalRule& r) {
  j = Json{{"kind", std::string(to_string(r.kind))}, {"active_hours", hours_to_json(r.active_hours)}};
  if (r.threshold) j["threshold"] = *r.threshold;
}

void from_json(const Json& j, TemporalRule& r) {
  auto kind = parse_temporal_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::UnknownKind, j.at("kind").get<std::string>());
  r.kind = *kind;
  r.active_hours = hours_from_json(j.at("active_hours"));
  r.threshold.reset();
  if (j.contains("threshold")) r.threshold = j.at("threshold").get<double>();
}

void to_json(Json& j, const IndicatorSample& s) { j = Json::array({s.time.to_string(), s.indicator}); }

void from_json(const Json& j, IndicatorSample& s) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "indicator must be [timestamp, 0|1]");
  s.time = j[0].get<Timestamp>();
  s.indicator = j[1].get<int>();
  if (s.indicator != 0 && s.indicator != 1) throw Error(ErrorCode::InvalidArgument, "indicator must be 0 or 1");
}

void to_json(Json& j, const TemporalFeature& f) {
  j = Json{{"name", f.name}, {"definition", f.definition}, {"values", f.values}};
}

void from_json(const Json& j, TemporalFeature& f) {
  f.name = j.at("name").get<std::string>();
  f.definition = j.at("definition").get<TemporalRule>();
  f.values = j.at("values").get<std::vector<IndicatorSample>>();
}

void to_json(Json& j, const DesignMatrix& d) {
  j = Json{{"columns", d.columns},
           {"temporal_rules", d.temporal_rules},
           {"X", matrix_to_json(d.X)},
           {"y", vector_to_json(d.y)},
           {"dependent_name", d.dependent_name},
           {"timestamps", d.timestamps},
           {"sampling_minutes", d.sampling_minutes}};
}

void from_json(const Json& j, DesignMatrix& d) {
  d.columns = j.at("columns").get<std::vector<std::string>>();
  d.temporal_rules = j.at("temporal_rules").get<std::vector<TemporalRule>>();
  d.X = matrix_from_json(j.at("X"), static_cast<Eigen::Index>(d.columns.size()));
  d.y = vector_from_json(j.at("y"));
  d.dependent_name = j.at("dependent_name").get<std::string>();
  d.timestamps = j.at("timestamps").get<std::vector<Timestamp>>();
  d.sampling_minutes = j.at("sampling_minutes").get<int>();
}

void to_json(Json& j, const PosteriorParams& p) {
  j = Json{{"mean", vector_to_json(p.mean)},
           {"precision", matrix_to_json(p.precision)},
           {"noise_shape", p.noise_shape},
           {"noise_rate", p.noise_rate}};
}

void from_json(const Json& j, PosteriorParams& p) {
  p.mean = vector_from_json(j.at("mean"));
  p.precision = matrix_from_json(j.at("precision"), p.mean.size());
  if (p.precision.rows() != p.mean.size()) throw Error(ErrorCode::InvalidArgument, "posterior precision must be square");
  p.noise_shape = j.at("noise_shape").get<double>();
  p.noise_rate = j.at("noise_rate").get<double>();
}

void to_json(Json& j, const FittedModel& m) {
  j = Json{{"version", kModelFormatVersion},
           {"solver", std::string(to_string(m.solver))},
           {"feature_order", m.feature_order},
           {"coefficients", vector_to_json(m.coefficients)},
           {"intercept", m.intercept},
           {"temporal_rules", m.temporal_rules},
           {"solver_params", m.solver_params},
           {"training",
            {{"rows", m.training.rows},
             {"dependent_name", m.training.dependent_name},
             {"sampling_minutes", m.training.sampling_minutes},
             {"residual_scale", m.training.residual_scale},
             {"converged", m.training.converged},
             {"iterations", m.training.iterations}}}};
  if (m.posterior) j["posterior"] = *m.posterior;
}

void from_json(const Json& j, FittedModel& m) {
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::InvalidArgument, "unsupported model format version " + std::to_string(version));
  }
  auto solver = parse_solver(j.at("solver").get<std::string>());
  if (!solver) throw Error(ErrorCode::UnknownSolver, j.at("solver").get<std::string>());
  m.solver = *solver;
  m.feature_order = j.at("feature_order").get<std::vector<std::string>>();
  m.coefficients = vector_from_json(j.at("coefficients"));
  if (m.coefficients.size() != static_cast<Eigen::Index>(m.feature_order.size())) {
    throw Error(ErrorCode::InvalidArgument, "coefficients length differs from feature_order");
  }
  m.intercept = j.at("intercept").get<double>();
  m.temporal_rules = j.value("temporal_rules", Json::object()).get<std::map<std::string, TemporalRule>>();
  m.solver_params = j.value("solver_params", Json::object()).get<std::map<std::string, double>>();
  const Json training = j.value("training", Json::object());
  m.training.rows = training.value("rows", std::size_t{0});
  m.training.dependent_name = training.value("dependent_name", std::string{});
  m.training.sampling_minutes = training.value("sampling_minutes", kDefaultSamplingMinutes);
  m.training.residual_scale = training.value("residual_scale", 0.0);
  m.training.converged = training.value("converged", true);
  m.training.iterations = training.value("iterations", 0);
  m.posterior.reset();
  if (j.contains("posterior")) {
    m.posterior = j.at("posterior").get<PosteriorParams>();
    if (m.posterior->mean.size() != m.coefficients.size() + 1) {
      throw Error(ErrorCode::InvalidArgument, "posterior mean must have one entry per coefficient plus the intercept");
    }
  }
}

void to_json(Json& j, const EventOverride& e) {
  j = Json{{"name", e.name}, {"target", e.target_feature}, {"value_kmh", e.value_kmh}, {"start", e.start}, {"end", e.end}};
  if (e.gate_feature) j["gate_feature"] = *e.gate_feature;
}

void from_json(const Json& j, EventOverride& e) {
  e.name = j.value("name", std::string{});
  e.target_feature = j.at("target").get<std::string>();
  e.value_kmh = j.at("value_kmh").get<double>();
  e.start = j.at("start").get<Timestamp>();
  e.end = j.at("end").get<Timestamp>();
  e.gate_feature.reset();
  if (j.contains("gate_feature") && !j.at("gate_feature").is_null()) e.gate_feature = j.at("gate_feature").get<std::string>();
  validate(e);
}

void to_json(Json& j, const TemporalRequest& r) {
  j = Json{{"kind", std::string(to_string(r.kind))}, {"name", r.name}};
  if (r.kind == TemporalKind::explicit_hours) j["hours"] = hours_to_json(r.hours);
}

void from_json(const Json& j, TemporalRequest& r) {
  const std::string kind_text = j.at("kind").get<std::string>();
  auto kind = parse_temporal_kind(kind_text);
  if (!kind) throw Error(ErrorCode::UnknownKind, kind_text);
  r.kind = *kind;
  r.name = j.value("name", std::string{});
  r.hours.reset();
  if (r.kind == TemporalKind::explicit_hours) {
    if (!j.contains("hours")) throw Error(ErrorCode::InvalidArgument, "explicit_hours requires 'hours'");
    r.hours = hours_from_json(j.at("hours"));
  }
}

void to_json(Json& j, const HourlyProfile& p) {
  j = Json{{"hour_means", p.hour_means}, {"threshold", p.threshold}, {"active_hours", hours_to_json(p.active_hours)}};
}

void to_json(Json& j, const Dataset& d) {
  j = Json{{"dependent", d.dependent_name},
           {"sampling_minutes", d.sampling_minutes},
           {"spatial", d.spatial},
           {"temporal", d.temporal}};
}

void from_json(const Json& j, Dataset& d) {
  d.dependent_name = j.at("dependent").get<std::string>();
  d.sampling_minutes = j.at("sampling_minutes").get<int>();
  d.spatial = j.at("spatial").get<std::vector<SpatialFeature>>();
  d.temporal = j.value("temporal", Json::array()).get<std::vector<TemporalFeature>>();
}

}  // namespace linkreg
