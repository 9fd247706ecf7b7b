#include "linkreg/regression.hpp"

#include <cmath>
#include <set>

#include "linkreg/error.hpp"

namespace linkreg {

namespace {

FittedModel skeleton(const DesignMatrix& design, Solver solver) {
  if (design.X.rows() != design.y.size()) throw Error(ErrorCode::LengthMismatch, "design X and y row counts differ");
  if (static_cast<Eigen::Index>(design.columns.size()) != design.X.cols()) {
    throw Error(ErrorCode::InvalidArgument, "design column names do not match the matrix width");
  }
  FittedModel model;
  model.solver = solver;
  model.feature_order = design.columns;
  model.training.rows = static_cast<std::size_t>(design.rows());
  model.training.dependent_name = design.dependent_name;
  model.training.sampling_minutes = design.sampling_minutes;
  for (std::size_t i = 0; i < design.temporal_rules.size(); ++i) {
    model.temporal_rules.emplace(design.columns.at(i), design.temporal_rules[i]);
  }
  return model;
}

double residual_standard_error(const DesignMatrix& design, const Eigen::VectorXd& coefficients, double intercept) {
  const Eigen::VectorXd residual = (design.y.array() - intercept).matrix() - design.X * coefficients;
  const Eigen::Index n = design.rows();
  const Eigen::Index dof = n - design.cols() - 1;
  const double denom = dof > 0 ? static_cast<double>(dof) : static_cast<double>(std::max<Eigen::Index>(n, 1));
  return std::sqrt(residual.squaredNorm() / denom);
}

}  // namespace

FittedModel fit_ols(const DesignMatrix& design) {
  FittedModel model = skeleton(design, Solver::ols);
  const LinearFit<double> fit = ols_solve(design.X, design.y);
  model.coefficients = fit.coefficients;
  model.intercept = fit.intercept;
  model.training.residual_scale = residual_standard_error(design, model.coefficients, model.intercept);
  return model;
}

FittedModel fit_elastic_net(const DesignMatrix& design, const ElasticNetParams& params) {
  FittedModel model = skeleton(design, Solver::elastic_net);
  const ElasticNetSolution<double> sol = elastic_net_solve(design.X, design.y, params);
  model.coefficients = sol.fit.coefficients;
  model.intercept = sol.fit.intercept;
  model.training.converged = sol.converged;
  model.training.iterations = sol.iterations;
  model.training.residual_scale = residual_standard_error(design, model.coefficients, model.intercept);
  model.solver_params = {{"lambda", params.lambda},
                         {"alpha_mix", params.alpha_mix},
                         {"tol", params.tol},
                         {"max_iter", static_cast<double>(params.max_iter)}};
  return model;
}

FittedModel fit_bayesian(const DesignMatrix& design, const BayesPrior& prior) {
  FittedModel model = skeleton(design, Solver::bayesian);
  const Eigen::Index n = design.rows();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "bayesian fit needs at least 2 rows");

  Eigen::MatrixXd augmented(n, design.cols() + 1);
  augmented.col(0).setOnes();
  augmented.rightCols(design.cols()) = design.X;
  const NigPosterior<double> post = conjugate_update(augmented, design.y, prior);

  PosteriorParams params;
  params.mean = post.mean;
  params.precision = post.precision;
  params.noise_shape = post.shape;
  params.noise_rate = post.rate;
  model.intercept = post.mean(0);
  model.coefficients = post.mean.tail(design.cols());
  model.posterior = std::move(params);
  model.training.residual_scale = std::sqrt(post.rate / post.shape);
  model.solver_params = {{"tau", prior.tau}, {"a0", prior.a0}, {"b0", prior.b0}};
  return model;
}

FittedModel fit_baseline(const DesignMatrix& design) {
  FittedModel model = skeleton(design, Solver::baseline);
  const Eigen::Index n = design.rows();
  if (n < 1) throw Error(ErrorCode::EmptyDesign, "baseline needs at least one row");
  model.intercept = design.y.mean();
  model.coefficients = Eigen::VectorXd::Zero(design.cols());
  const double ss = (design.y.array() - model.intercept).square().sum();
  model.training.residual_scale = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return model;
}

FittedModel fit(const DesignMatrix& design, Solver solver, const ElasticNetParams& elastic, const BayesPrior& prior) {
  switch (solver) {
    case Solver::ols: return fit_ols(design);
    case Solver::elastic_net: return fit_elastic_net(design, elastic);
    case Solver::bayesian: return fit_bayesian(design, prior);
    case Solver::baseline: return fit_baseline(design);
  }
  throw Error(ErrorCode::UnknownSolver, "unhandled solver");
}

Eigen::VectorXd regressor_vector(const FittedModel& model, const FeatureValues& inputs) {
  const std::set<std::string> known(model.feature_order.begin(), model.feature_order.end());
  for (const auto& [name, value] : inputs) {
    if (!known.count(name)) throw Error(ErrorCode::UnknownFeature, name);
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(model.feature_order.size()));
  for (std::size_t i = 0; i < model.feature_order.size(); ++i) {
    const std::string& name = model.feature_order[i];
    auto it = inputs.find(name);
    if (it == inputs.end()) throw Error(ErrorCode::MissingFeature, name);
    const double value = it->second;
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidInput, name + " is not finite");
    if (model.is_temporal(name)) {
      if (value != 0.0 && value != 1.0) throw Error(ErrorCode::InvalidInput, name + " must be 0 or 1");
    } else if (value < 0.0) {
      throw Error(ErrorCode::InvalidInput, name + " must be >= 0 km/h");
    }
    x(static_cast<Eigen::Index>(i)) = value;
  }
  return x;
}

PointPrediction predict_point(const FittedModel& model, const FeatureValues& inputs) {
  const Eigen::VectorXd x = regressor_vector(model, inputs);
  PointPrediction out;
  out.raw_kmh = model.intercept + model.coefficients.dot(x);
  out.clamped = out.raw_kmh < 0.0;
  out.value_kmh = out.clamped ? 0.0 : out.raw_kmh;
  return out;
}

PredictiveDistribution predict_distribution(const FittedModel& model, const FeatureValues& inputs) {
  if (!model.posterior) throw Error(ErrorCode::NotBayesian, std::string(to_string(model.solver)) + " model has no posterior");
  const PosteriorParams& post = *model.posterior;
  const Eigen::VectorXd x = regressor_vector(model, inputs);
  Eigen::VectorXd augmented(x.size() + 1);
  augmented(0) = 1.0;
  augmented.tail(x.size()) = x;

  Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalInstability, "posterior precision is not positive definite");
  const double leverage = augmented.dot(llt.solve(augmented));

  PredictiveDistribution dist;
  dist.mean = augmented.dot(post.mean);
  dist.dof = 2.0 * post.noise_shape;
  dist.scale = std::sqrt(post.noise_rate / post.noise_shape * (1.0 + leverage));
  return dist;
}

PredictiveDistribution predict_residual_band(const FittedModel& model, const FeatureValues& inputs) {
  PredictiveDistribution dist;
  dist.mean = predict_point(model, inputs).raw_kmh;
  dist.scale = model.training.residual_scale;
  return dist;
}

Eigen::VectorXd predict_rows(const FittedModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.coefficients.size()) throw Error(ErrorCode::LengthMismatch, "design width differs from the model");
  Eigen::VectorXd raw = (X * model.coefficients).array() + model.intercept;
  return raw.cwiseMax(0.0);
}

CoefficientSpread posterior_sd(const FittedModel& model) {
  if (!model.posterior) throw Error(ErrorCode::NotBayesian, std::string(to_string(model.solver)) + " model has no posterior");
  NigPosterior<double> post;
  post.mean = model.posterior->mean;
  post.precision = model.posterior->precision;
  post.shape = model.posterior->noise_shape;
  post.rate = model.posterior->noise_rate;
  Eigen::VectorXd var = post.coefficient_variance();
  Eigen::VectorXd sd = var.allFinite() ? Eigen::VectorXd(var.cwiseSqrt()) : post.coefficient_scale();
  CoefficientSpread out;
  out.intercept = sd(0);
  out.coefficients = sd.tail(sd.size() - 1);
  return out;
}

}  // namespace linkreg
