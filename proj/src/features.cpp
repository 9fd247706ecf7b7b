#include "linkreg/features.hpp"

#include <algorithm>

#include "linkreg/error.hpp"
#include "linkreg/ingestion.hpp"

namespace linkreg {

HourlyProfile profile_from_means(const std::array<double, 24>& hour_means) {
  HourlyProfile profile;
  profile.hour_means = hour_means;
  double total = 0.0;
  for (double m : hour_means) total += m;
  profile.threshold = total / 24.0;
  for (std::size_t h = 0; h < 24; ++h) {
    if (hour_means[h] < profile.threshold) profile.active_hours.set(h);
  }
  return profile;
}

HourlyProfile hourly_profile(const std::vector<const SpatialFeature*>& features) {
  if (features.empty()) throw Error(ErrorCode::EmptyInput, "no spatial features");
  for (const SpatialFeature* f : features) {
    if (f->series.empty()) throw Error(ErrorCode::EmptyInput, "series '" + f->name + "' is empty");
  }
  const std::vector<Timestamp> shared = common_timestamps(features);

  std::array<double, 24> sums{};
  std::array<std::size_t, 24> counts{};
  for (const SpatialFeature* f : features) {
    auto cursor = shared.begin();
    for (const SpeedSample& s : f->series) {
      cursor = std::lower_bound(cursor, shared.end(), s.time);
      if (cursor == shared.end()) break;
      if (*cursor != s.time) continue;
      const auto h = static_cast<std::size_t>(s.time.hour());
      sums[h] += s.speed_kmh;
      ++counts[h];
    }
  }
  std::array<double, 24> means{};
  for (std::size_t h = 0; h < 24; ++h) {
    if (counts[h] == 0) throw Error(ErrorCode::MissingHour, "no observations at hour " + std::to_string(h));
    means[h] = sums[h] / static_cast<double>(counts[h]);
  }
  return profile_from_means(means);
}

HourlyProfile hourly_profile(const std::vector<SpatialFeature>& features) {
  std::vector<const SpatialFeature*> ptrs;
  for (const auto& f : features) ptrs.push_back(&f);
  return hourly_profile(ptrs);
}

TemporalFeature extract_hours(const std::string& name, const TemporalRule& rule, const std::vector<Timestamp>& timestamps) {
  TemporalFeature out;
  out.name = name;
  out.definition = rule;
  out.values.reserve(timestamps.size());
  for (const Timestamp& t : timestamps) out.values.push_back({t, rule.indicator(t)});
  return out;
}

TemporalFeature extract_peakhour(const HourlyProfile& profile, const std::vector<Timestamp>& timestamps,
                                 const std::string& name) {
  TemporalRule rule;
  rule.kind = TemporalKind::peakhour;
  rule.active_hours = profile.active_hours;
  rule.threshold = profile.threshold;
  return extract_hours(name, rule, timestamps);
}

TemporalRule am_rule() {
  TemporalRule rule;
  rule.kind = TemporalKind::am;
  for (std::size_t h = 0; h < 12; ++h) rule.active_hours.set(h);
  return rule;
}

TemporalFeature extract_am(const std::vector<Timestamp>& timestamps, const std::string& name) {
  return extract_hours(name, am_rule(), timestamps);
}

TemporalFeature extract_explicit_hours(const HourSet& hours, const std::vector<Timestamp>& timestamps,
                                       const std::string& name) {
  TemporalRule rule;
  rule.kind = TemporalKind::explicit_hours;
  rule.active_hours = hours;
  return extract_hours(name, rule, timestamps);
}

std::string default_feature_name(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::peakhour: return "Peakhour";
    case TemporalKind::am: return "AM";
    case TemporalKind::explicit_hours: return "Hours";
  }
  return "Hours";
}

const TemporalFeature& attach_temporal(Dataset& dataset, const TemporalRequest& request) {
  const std::string name = request.name.empty() ? default_feature_name(request.kind) : request.name;
  if (dataset.find_spatial(name)) throw Error(ErrorCode::DuplicateName, "'" + name + "' already names a link");

  const std::vector<const SpatialFeature*> links = dataset.all_spatial();
  const std::vector<Timestamp> timestamps = common_timestamps(links);
  if (timestamps.empty()) throw Error(ErrorCode::EmptyIntersection, "links share no timestamps");

  TemporalFeature feature;
  switch (request.kind) {
    case TemporalKind::peakhour: feature = extract_peakhour(hourly_profile(links), timestamps, name); break;
    case TemporalKind::am: feature = extract_am(timestamps, name); break;
    case TemporalKind::explicit_hours: feature = extract_explicit_hours(request.hours, timestamps, name); break;
  }

  auto existing = std::find_if(dataset.temporal.begin(), dataset.temporal.end(),
                               [&](const TemporalFeature& t) { return t.name == name; });
  if (existing != dataset.temporal.end()) {
    *existing = std::move(feature);
    return *existing;
  }
  dataset.temporal.push_back(std::move(feature));
  return dataset.temporal.back();
}

}  // namespace linkreg
