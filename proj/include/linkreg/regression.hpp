#pragma once

#include <Eigen/Dense>

#include "linkreg/distribution.hpp"
#include "linkreg/solvers.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

using ElasticNetParams = ElasticNetOptions<double>;
using BayesPrior = NigPrior<double>;

FittedModel fit_ols(const DesignMatrix& design);

/// Non-convergence is reported through `training.converged`, not thrown.
FittedModel fit_elastic_net(const DesignMatrix& design, const ElasticNetParams& params = {});

/// Conjugate fit over [1, X]; coefficients and intercept are the posterior
/// mean.
FittedModel fit_bayesian(const DesignMatrix& design, const BayesPrior& prior = {});

FittedModel fit_baseline(const DesignMatrix& design);

/// Dispatch on `solver`. Parameters not used by the solver are ignored.
FittedModel fit(const DesignMatrix& design, Solver solver, const ElasticNetParams& elastic = {},
                const BayesPrior& prior = {});

struct PointPrediction {
  double value_kmh = 0.0;  // clamped at 0
  double raw_kmh = 0.0;    // alpha + beta'x before clamping
  bool clamped = false;
};

/// Regressor vector in `model.feature_order`. Throws MissingFeature /
/// UnknownFeature, and InvalidInput for non-binary temporal values or
/// negative / non-finite speeds.
Eigen::VectorXd regressor_vector(const FittedModel& model, const FeatureValues& inputs);

PointPrediction predict_point(const FittedModel& model, const FeatureValues& inputs);

/// Student-t posterior predictive of a bayesian model. Throws NotBayesian.
PredictiveDistribution predict_distribution(const FittedModel& model, const FeatureValues& inputs);

/// Normal band around the point prediction using the residual standard
/// error; meaningful for any solver.
PredictiveDistribution predict_residual_band(const FittedModel& model, const FeatureValues& inputs);

/// Clamped predictions for every row of a design laid out like the model.
Eigen::VectorXd predict_rows(const FittedModel& model, const Eigen::MatrixXd& X);

/// Marginal posterior standard deviations of the coefficients (in
/// feature_order, intercept excluded) and of the intercept.
struct CoefficientSpread {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
};
CoefficientSpread posterior_sd(const FittedModel& model);

}  // namespace linkreg
