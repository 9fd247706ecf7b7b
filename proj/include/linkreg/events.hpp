#pragma once

#include <map>
#include <string>
#include <vector>

#include "linkreg/types.hpp"

namespace linkreg {

/// Temporal feature name -> rule deciding whether it is active at a time.
using TemporalCalendar = std::map<std::string, TemporalRule>;

/// True when `at` lies in [start, end) and the event's gate feature, if any,
/// is active at `at`. Throws UnknownFeature for a gate missing from the
/// calendar.
bool event_active(const EventOverride& event, const Timestamp& at, const TemporalCalendar& calendar);

/// For each target feature, the event that takes effect at `at`: among the
/// active events on that target the one with the latest window start wins;
/// ties fall to the later end, then the greater name, then the greater value,
/// so the choice does not depend on list order.
std::map<std::string, const EventOverride*> winning_events(const std::vector<EventOverride>& events, const Timestamp& at,
                                                           const TemporalCalendar& calendar = {});

/// Replaces targeted input values by their winning event's value; all other
/// inputs pass through. Throws UnknownTarget when an event targets a feature
/// absent from `inputs`, or targets a temporal feature.
FeatureValues apply_events(const FeatureValues& inputs, const std::vector<EventOverride>& events, const Timestamp& at,
                           const TemporalCalendar& calendar = {});

}  // namespace linkreg
