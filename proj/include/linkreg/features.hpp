#pragma once

#include <array>
#include <string>
#include <vector>

#include "linkreg/dataset.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

/// Pooled clock-hour means across links and the threshold that splits them.
struct HourlyProfile {
  std::array<double, 24> hour_means{};
  double threshold = 0.0;  // mean of hour_means
  HourSet active_hours;    // { h : hour_means[h] < threshold }
};

/// Builds a profile from raw hourly means (threshold and active set derived).
HourlyProfile profile_from_means(const std::array<double, 24>& hour_means);

/// Pools every speed observed at clock hour h, over all given links and only
/// at timestamps shared by all of them. Throws EmptyInput, MissingHour(h).
HourlyProfile hourly_profile(const std::vector<const SpatialFeature*>& features);
HourlyProfile hourly_profile(const std::vector<SpatialFeature>& features);

TemporalFeature extract_hours(const std::string& name, const TemporalRule& rule, const std::vector<Timestamp>& timestamps);

/// Indicator of the profile's below-threshold hours.
TemporalFeature extract_peakhour(const HourlyProfile& profile, const std::vector<Timestamp>& timestamps,
                                 const std::string& name = "Peakhour");

/// 1 for clock times in [00:00, 12:00); noon is PM.
TemporalFeature extract_am(const std::vector<Timestamp>& timestamps, const std::string& name = "AM");

TemporalFeature extract_explicit_hours(const HourSet& hours, const std::vector<Timestamp>& timestamps,
                                       const std::string& name);

TemporalRule am_rule();

struct TemporalRequest {
  TemporalKind kind = TemporalKind::peakhour;
  std::string name;  // empty selects the kind's default name
  HourSet hours;     // explicit_hours only
};

std::string default_feature_name(TemporalKind kind);

/// Extracts the requested feature over the dataset's shared timestamps and
/// attaches it, replacing an existing temporal feature of the same name.
/// Throws DuplicateName when the name belongs to a link.
const TemporalFeature& attach_temporal(Dataset& dataset, const TemporalRequest& request);

}  // namespace linkreg
