#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace linkreg {

/// Location-scale Student-t; `dof == inf` is the normal limit.
struct PredictiveDistribution {
  double mean = 0.0;
  double scale = 1.0;
  double dof = std::numeric_limits<double>::infinity();

  bool is_normal() const { return std::isinf(dof); }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double quantile(double prob) const;

  /// Central interval holding `level` of the mass.
  std::pair<double, double> interval(double level) const;

  /// `points` evenly spaced (x, density) pairs covering the central 99.9%.
  std::vector<std::pair<double, double>> density_polyline(int points = 200) const;
};

}  // namespace linkreg
