#include "linkreg/events.hpp"

#include <tuple>

#include "linkreg/error.hpp"

namespace linkreg {

bool event_active(const EventOverride& event, const Timestamp& at, const TemporalCalendar& calendar) {
  if (!(event.start <= at && at < event.end)) return false;
  if (!event.gate_feature) return true;
  auto it = calendar.find(*event.gate_feature);
  if (it == calendar.end()) throw Error(ErrorCode::UnknownFeature, "gate feature '" + *event.gate_feature + "'");
  return it->second.indicator(at) == 1;
}

std::map<std::string, const EventOverride*> winning_events(const std::vector<EventOverride>& events, const Timestamp& at,
                                                           const TemporalCalendar& calendar) {
  auto rank = [](const EventOverride& e) { return std::tie(e.start, e.end, e.name, e.value_kmh); };
  std::map<std::string, const EventOverride*> winners;
  for (const EventOverride& event : events) {
    if (!event_active(event, at, calendar)) continue;
    auto [it, inserted] = winners.emplace(event.target_feature, &event);
    if (!inserted && rank(*it->second) < rank(event)) it->second = &event;
  }
  return winners;
}

FeatureValues apply_events(const FeatureValues& inputs, const std::vector<EventOverride>& events, const Timestamp& at,
                           const TemporalCalendar& calendar) {
  for (const EventOverride& event : events) {
    validate(event);
    if (!inputs.count(event.target_feature) || calendar.count(event.target_feature)) {
      throw Error(ErrorCode::UnknownTarget, event.target_feature);
    }
  }
  FeatureValues out = inputs;
  for (const auto& [target, event] : winning_events(events, at, calendar)) out[target] = event->value_kmh;
  return out;
}

}  // namespace linkreg
