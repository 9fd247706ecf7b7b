#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "linkreg/types.hpp"

namespace linkreg {

/// Validated links plus any temporal features extracted from them.
struct Dataset {
  std::vector<SpatialFeature> spatial;
  std::vector<TemporalFeature> temporal;
  std::string dependent_name;
  int sampling_minutes = kDefaultSamplingMinutes;

  const SpatialFeature* find_spatial(std::string_view name) const;
  /// Spatial features other than the dependent one, in declaration order.
  std::vector<const SpatialFeature*> independents() const;
  std::vector<const SpatialFeature*> all_spatial() const;
};

}  // namespace linkreg
