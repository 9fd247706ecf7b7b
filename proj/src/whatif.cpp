#include "linkreg/whatif.hpp"

#include "linkreg/error.hpp"

namespace linkreg {

WhatIfResult run_what_if(const FittedModel& model, const WhatIfRequest& request) {
  FeatureValues inputs = request.inputs;
  for (const auto& [name, rule] : model.temporal_rules) {
    if (inputs.count(name)) continue;
    if (!request.at) throw Error(ErrorCode::MissingFeature, name + " (supply it or a time)");
    inputs[name] = rule.indicator(*request.at);
  }

  WhatIfResult result;
  if (!request.events.empty()) {
    if (!request.at) throw Error(ErrorCode::InvalidArgument, "events need a prediction time");
    inputs = apply_events(inputs, request.events, *request.at, model.temporal_rules);
    for (const auto& [target, event] : winning_events(request.events, *request.at, model.temporal_rules)) {
      result.applied_events.push_back(*event);
    }
  }
  result.point = predict_point(model, inputs);
  if (model.posterior) result.distribution = predict_distribution(model, inputs);
  result.effective_inputs = std::move(inputs);
  return result;
}

WhatIfRequest what_if_from_json(const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be an object");
  WhatIfRequest request;
  try {
    if (body.contains("inputs")) {
      for (const auto& [name, value] : body.at("inputs").items()) {
        if (!value.is_number()) throw Error(ErrorCode::InvalidInput, name + " must be a number");
        request.inputs[name] = value.get<double>();
      }
    }
    const char* time_key = body.contains("time") ? "time" : (body.contains("at") ? "at" : nullptr);
    if (time_key && !body.at(time_key).is_null()) {
      const std::string text = body.at(time_key).get<std::string>();
      request.at = Timestamp::parse_flexible(text);
      if (!request.at) throw Error(ErrorCode::InvalidArgument, "bad time '" + text + "'");
    }
    if (body.contains("events")) request.events = body.at("events").get<std::vector<EventOverride>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("predict request: ") + e.what());
  }
  return request;
}

Json what_if_to_json(const FittedModel& model, const WhatIfResult& result) {
  Json out;
  out["dependent"] = model.training.dependent_name;
  out["solver"] = std::string(to_string(model.solver));
  out["inputs"] = result.effective_inputs;
  Json applied = Json::array();
  for (const auto& e : result.applied_events) {
    applied.push_back({{"name", e.name}, {"target", e.target_feature}, {"value_kmh", e.value_kmh}});
  }
  out["events_applied"] = applied;
  out["prediction"] = {{"value_kmh", result.point.value_kmh},
                       {"raw_kmh", result.point.raw_kmh},
                       {"clamped", result.point.clamped}};
  if (result.distribution) {
    const PredictiveDistribution& d = *result.distribution;
    const auto [lo, hi] = d.interval(kReportedIntervalLevel);
    Json density = Json::array();
    for (const auto& [x, y] : d.density_polyline(kDensityPoints)) density.push_back(Json::array({x, y}));
    out["distribution"] = {{"mean", d.mean},
                           {"scale", d.scale},
                           {"dof", d.dof},
                           {"interval_level", kReportedIntervalLevel},
                           {"interval", Json::array({lo, hi})},
                           {"density", density}};
  }
  return out;
}

Json model_report(const FittedModel& model) {
  Json report;
  report["solver"] = std::string(to_string(model.solver));
  report["dependent"] = model.training.dependent_name;
  report["rows"] = model.training.rows;
  report["residual_scale"] = model.training.residual_scale;
  report["converged"] = model.training.converged;
  if (model.solver == Solver::elastic_net) report["iterations"] = model.training.iterations;
  report["solver_params"] = model.solver_params;

  std::optional<CoefficientSpread> spread;
  if (model.posterior) spread = posterior_sd(model);
  Json intercept{{"estimate", model.intercept}};
  if (spread) intercept["sd"] = spread->intercept;
  report["intercept"] = intercept;

  Json coefficients = Json::array();
  for (std::size_t i = 0; i < model.feature_order.size(); ++i) {
    const std::string& name = model.feature_order[i];
    Json row{{"name", name},
             {"kind", model.is_temporal(name) ? "temporal" : "spatial"},
             {"estimate", model.coefficients(static_cast<Eigen::Index>(i))}};
    if (spread) row["sd"] = spread->coefficients(static_cast<Eigen::Index>(i));
    coefficients.push_back(std::move(row));
  }
  report["coefficients"] = coefficients;
  report["temporal_rules"] = model.temporal_rules;
  return report;
}

}  // namespace linkreg
