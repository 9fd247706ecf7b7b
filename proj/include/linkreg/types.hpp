#pragma once

#include <Eigen/Dense>

#include <bitset>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkreg/timestamp.hpp"

namespace linkreg {

inline constexpr int kDefaultSamplingMinutes = 15;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const LatLon&, const LatLon&) = default;
};

struct SpeedSample {
  Timestamp time;
  double speed_kmh = 0.0;
  friend bool operator==(const SpeedSample&, const SpeedSample&) = default;
};

/// A road link: its speed series (the congestion index) and polyline.
/// An empty waypoint list means no geometry was supplied.
struct SpatialFeature {
  std::string name;
  std::vector<SpeedSample> series;
  std::vector<LatLon> waypoints;
  friend bool operator==(const SpatialFeature&, const SpatialFeature&) = default;
};

/// Clock hours 0..23.
using HourSet = std::bitset<24>;

enum class TemporalKind { peakhour, am, explicit_hours };

std::string_view to_string(TemporalKind kind);
std::optional<TemporalKind> parse_temporal_kind(std::string_view text);

/// How a binary temporal indicator is derived from a timestamp. Every kind
/// reduces to hour-of-day membership; `threshold` is kept for peakhour
/// features so the extraction can be reported.
struct TemporalRule {
  TemporalKind kind = TemporalKind::explicit_hours;
  HourSet active_hours;
  std::optional<double> threshold;

  int indicator(const Timestamp& t) const { return active_hours.test(static_cast<std::size_t>(t.hour())) ? 1 : 0; }
  friend bool operator==(const TemporalRule&, const TemporalRule&) = default;
};

struct IndicatorSample {
  Timestamp time;
  int indicator = 0;
  friend bool operator==(const IndicatorSample&, const IndicatorSample&) = default;
};

struct TemporalFeature {
  std::string name;
  std::vector<IndicatorSample> values;
  TemporalRule definition;
  friend bool operator==(const TemporalFeature&, const TemporalFeature&) = default;
};

/// Aligned regression input. Columns are the temporal features (in
/// declaration order) followed by the independent spatial features; row i
/// was observed at `timestamps[i]`.
struct DesignMatrix {
  std::vector<std::string> columns;
  std::vector<TemporalRule> temporal_rules;  // one per leading temporal column
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::string dependent_name;
  std::vector<Timestamp> timestamps;
  int sampling_minutes = kDefaultSamplingMinutes;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
  std::size_t temporal_count() const { return temporal_rules.size(); }

  DesignMatrix select_rows(const std::vector<Eigen::Index>& rows) const;
};

enum class Solver { ols, elastic_net, bayesian, baseline };

std::string_view to_string(Solver solver);
std::optional<Solver> parse_solver(std::string_view text);

/// Normal-inverse-gamma posterior over (intercept, coefficients, noise
/// variance). `mean` has the intercept first; `precision` is scaled by the
/// noise variance, i.e. beta | sigma^2 ~ N(mean, sigma^2 * precision^-1).
struct PosteriorParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
  double noise_shape = 0.0;
  double noise_rate = 0.0;
};

struct TrainingMeta {
  std::size_t rows = 0;
  std::string dependent_name;
  int sampling_minutes = kDefaultSamplingMinutes;
  double residual_scale = 0.0;
  bool converged = true;
  int iterations = 0;
};

struct FittedModel {
  Solver solver = Solver::ols;
  std::vector<std::string> feature_order;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  std::optional<PosteriorParams> posterior;
  TrainingMeta training;
  std::map<std::string, double> solver_params;
  /// Rules for the temporal entries of feature_order, used to fill them in
  /// from a clock time at prediction.
  std::map<std::string, TemporalRule> temporal_rules;

  bool is_temporal(const std::string& feature) const { return temporal_rules.count(feature) > 0; }
};

/// Replaces one independent link's speed while `start <= at < end`.
struct EventOverride {
  std::string name;
  std::string target_feature;
  double value_kmh = 0.0;
  Timestamp start;
  Timestamp end;
  std::optional<std::string> gate_feature;
  friend bool operator==(const EventOverride&, const EventOverride&) = default;
};

/// Throws InvalidArgument when value < 0 or the window is empty.
void validate(const EventOverride& event);

using FeatureValues = std::map<std::string, double>;

}  // namespace linkreg
