#include "linkreg/distribution.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <numbers>

#include "linkreg/error.hpp"

namespace linkreg {

double PredictiveDistribution::log_pdf(double x) const {
  const double z = (x - mean) / scale;
  if (is_normal()) {
    return -0.5 * z * z - std::log(scale) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double v = dof;
  return std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi) - std::log(scale) -
         0.5 * (v + 1.0) * std::log1p(z * z / v);
}

double PredictiveDistribution::pdf(double x) const { return std::exp(log_pdf(x)); }

double PredictiveDistribution::cdf(double x) const {
  const double z = (x - mean) / scale;
  if (is_normal()) return boost::math::cdf(boost::math::normal_distribution<double>(), z);
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), z);
}

double PredictiveDistribution::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability must lie in (0,1)");
  double z = 0.0;
  if (is_normal()) {
    z = boost::math::quantile(boost::math::normal_distribution<double>(), prob);
  } else {
    z = boost::math::quantile(boost::math::students_t_distribution<double>(dof), prob);
  }
  return mean + scale * z;
}

std::pair<double, double> PredictiveDistribution::interval(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "interval level must lie in (0,1)");
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

std::vector<std::pair<double, double>> PredictiveDistribution::density_polyline(int points) const {
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "density polyline needs at least 2 points");
  const auto [lo, hi] = interval(0.999);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(points));
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double x = (i == points - 1) ? hi : lo + step * i;
    out.emplace_back(x, pdf(x));
  }
  return out;
}

}  // namespace linkreg
