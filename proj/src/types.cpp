#include "linkreg/types.hpp"

#include "linkreg/error.hpp"

namespace linkreg {

std::string_view to_string(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::peakhour: return "peakhour";
    case TemporalKind::am: return "am";
    case TemporalKind::explicit_hours: return "explicit_hours";
  }
  return "explicit_hours";
}

std::optional<TemporalKind> parse_temporal_kind(std::string_view text) {
  if (text == "peakhour") return TemporalKind::peakhour;
  if (text == "am") return TemporalKind::am;
  if (text == "explicit_hours") return TemporalKind::explicit_hours;
  return std::nullopt;
}

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::ols: return "ols";
    case Solver::elastic_net: return "elastic_net";
    case Solver::bayesian: return "bayesian";
    case Solver::baseline: return "baseline";
  }
  return "ols";
}

std::optional<Solver> parse_solver(std::string_view text) {
  if (text == "ols") return Solver::ols;
  if (text == "elastic_net") return Solver::elastic_net;
  if (text == "bayesian") return Solver::bayesian;
  if (text == "baseline") return Solver::baseline;
  return std::nullopt;
}

DesignMatrix DesignMatrix::select_rows(const std::vector<Eigen::Index>& rows) const {
  DesignMatrix out;
  out.columns = columns;
  out.temporal_rules = temporal_rules;
  out.dependent_name = dependent_name;
  out.sampling_minutes = sampling_minutes;
  out.X = X(rows, Eigen::all);
  out.y = y(rows);
  if (!timestamps.empty()) {
    out.timestamps.reserve(rows.size());
    for (auto r : rows) out.timestamps.push_back(timestamps.at(static_cast<std::size_t>(r)));
  }
  return out;
}

void validate(const EventOverride& event) {
  if (!(event.value_kmh >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "event '" + event.name + "' has a negative value");
  }
  if (!(event.start < event.end)) {
    throw Error(ErrorCode::InvalidArgument, "event '" + event.name + "' window start must precede end");
  }
  if (event.target_feature.empty()) {
    throw Error(ErrorCode::InvalidArgument, "event '" + event.name + "' has no target");
  }
}

}  // namespace linkreg
