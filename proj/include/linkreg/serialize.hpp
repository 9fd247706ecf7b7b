#pragma once

// JSON mappings for the domain types. Doubles are written in shortest
// round-trip form, so decode(encode(x)) reproduces every finite value
// bit for bit.

#include "json.hpp"

#include "linkreg/dataset.hpp"
#include "linkreg/features.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

using Json = nlohmann::json;

void to_json(Json& j, const Timestamp& t);
void from_json(const Json& j, Timestamp& t);
void to_json(Json& j, const LatLon& p);
void from_json(const Json& j, LatLon& p);
void to_json(Json& j, const SpeedSample& s);
void from_json(const Json& j, SpeedSample& s);
void to_json(Json& j, const SpatialFeature& f);
void from_json(const Json& j, SpatialFeature& f);
void to_json(Json& j, const TemporalRule& r);
void from_json(const Json& j, TemporalRule& r);
void to_json(Json& j, const IndicatorSample& s);
void from_json(const Json& j, IndicatorSample& s);
void to_json(Json& j, const TemporalFeature& f);
void from_json(const Json& j, TemporalFeature& f);
void to_json(Json& j, const DesignMatrix& d);
void from_json(const Json& j, DesignMatrix& d);
void to_json(Json& j, const PosteriorParams& p);
void from_json(const Json& j, PosteriorParams& p);
void to_json(Json& j, const FittedModel& m);
void from_json(const Json& j, FittedModel& m);
void to_json(Json& j, const EventOverride& e);
void from_json(const Json& j, EventOverride& e);
void to_json(Json& j, const TemporalRequest& r);
void from_json(const Json& j, TemporalRequest& r);
void to_json(Json& j, const HourlyProfile& p);
void to_json(Json& j, const Dataset& d);
void from_json(const Json& j, Dataset& d);

Json hours_to_json(const HourSet& hours);
HourSet hours_from_json(const Json& j);

/// Parses text and converts, mapping every JSON failure to
/// Error(InvalidArgument) with the library's message.
template <typename T>
T decode(const Json& j, const char* what);

Json parse_json(std::string_view text, const char* what);

}  // namespace linkreg

#include "linkreg/error.hpp"

namespace linkreg {

template <typename T>
T decode(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": " + e.what());
  }
}

}  // namespace linkreg
