#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "linkreg/types.hpp"

namespace linkreg {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: version, solver, feature_order, coefficients,
/// intercept, optional posterior, plus training metadata and temporal rules.
std::string model_to_text(const FittedModel& model);
FittedModel model_from_text(std::string_view text);

void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace linkreg
