#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linkreg/distribution.hpp"
#include "linkreg/events.hpp"
#include "linkreg/regression.hpp"
#include "linkreg/serialize.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

/// One what-if query: link speeds, an optional clock time from which the
/// model's temporal features are derived, and event overrides.
struct WhatIfRequest {
  FeatureValues inputs;
  std::optional<Timestamp> at;
  std::vector<EventOverride> events;
};

struct WhatIfResult {
  FeatureValues effective_inputs;  // after temporal fill-in and events
  std::vector<EventOverride> applied_events;
  PointPrediction point;
  std::optional<PredictiveDistribution> distribution;  // bayesian models only
};

inline constexpr double kReportedIntervalLevel = 0.99;
inline constexpr int kDensityPoints = 200;

/// Temporal features missing from the inputs are computed from `at` with the
/// model's stored rules (explicit values win). Events need `at`.
WhatIfResult run_what_if(const FittedModel& model, const WhatIfRequest& request);

WhatIfRequest what_if_from_json(const Json& body);
Json what_if_to_json(const FittedModel& model, const WhatIfResult& result);

/// Per-feature coefficient report (posterior sd included for bayesian).
Json model_report(const FittedModel& model);

}  // namespace linkreg
