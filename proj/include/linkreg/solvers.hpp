#pragma once

// Dense least-squares kernels. Everything here works on plain Eigen
// expressions and is templated on the scalar type; the domain-level wrappers
// in regression.hpp adapt them to DesignMatrix / FittedModel.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "linkreg/error.hpp"

namespace linkreg {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct LinearFit {
  Vec<Scalar> coefficients;
  Scalar intercept = Scalar(0);
};

template <typename Scalar>
Scalar soft_threshold(Scalar value, Scalar threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return Scalar(0);
}

/// Numerical rank test on the column-centered design. Columns are scaled to
/// unit norm first so the tolerance is relative.
template <typename Derived>
bool has_full_column_rank(const Eigen::MatrixBase<Derived>& centered,
                          typename Derived::Scalar tol = typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index p = centered.cols();
  if (p == 0) return true;
  Mat<Scalar> scaled = centered;
  for (Eigen::Index j = 0; j < p; ++j) {
    Scalar norm = scaled.col(j).norm();
    if (!(norm > Scalar(0))) return false;
    scaled.col(j) /= norm;
  }
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(scaled);
  qr.setThreshold(tol);
  return qr.rank() == p;
}

/// Ordinary least squares with an unpenalized intercept. The intercept is
/// separated by centering; the slope solves the centered normal equations
/// with a Cholesky factorization.
template <typename DerivedX, typename DerivedY>
LinearFit<typename DerivedX::Scalar> ols_solve(const Eigen::MatrixBase<DerivedX>& X,
                                                const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (n <= p + 1) {
    throw Error(ErrorCode::TooFewRows, "need more than " + std::to_string(p + 1) + " rows, got " + std::to_string(n));
  }

  const Vec<Scalar> x_mean = X.colwise().mean().transpose();
  const Scalar y_mean = y.mean();
  const Mat<Scalar> Xc = X.rowwise() - x_mean.transpose();
  const Vec<Scalar> yc = y.array() - y_mean;

  for (Eigen::Index j = 0; j < p; ++j) {
    const Scalar raw = X.col(j).norm();
    if (!(Xc.col(j).norm() > Scalar(1e-12) * (raw + std::numeric_limits<Scalar>::min()))) {
      throw Error(ErrorCode::RankDeficient, "column " + std::to_string(j) + " is constant (collinear with intercept)");
    }
  }
  if (!has_full_column_rank(Xc)) throw Error(ErrorCode::RankDeficient, "design columns are collinear");

  const Mat<Scalar> gram = Xc.transpose() * Xc;
  Eigen::LLT<Mat<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::RankDeficient, "normal equations are not positive definite");

  LinearFit<Scalar> fit;
  fit.coefficients = llt.solve(Xc.transpose() * yc);
  fit.intercept = y_mean - x_mean.dot(fit.coefficients);
  return fit;
}

template <typename Scalar>
struct ElasticNetOptions {
  Scalar lambda = Scalar(0.1);
  Scalar alpha_mix = Scalar(0.5);
  Scalar tol = Scalar(1e-7);
  int max_iter = 10000;
};

template <typename Scalar>
struct ElasticNetSolution {
  LinearFit<Scalar> fit;
  bool converged = false;
  int iterations = 0;
  /// Objective on the standardized problem: entry 0 at the zero start, then
  /// one entry after each full sweep.
  std::vector<Scalar> objective_trace;
};

/// Standardized penalized least-squares objective
/// (1/2n)||r - Z b||^2 + lambda (a ||b||_1 + (1 - a)/2 ||b||^2).
template <typename DerivedZ, typename DerivedR, typename DerivedB>
typename DerivedZ::Scalar elastic_net_objective(const Eigen::MatrixBase<DerivedZ>& Z, const Eigen::MatrixBase<DerivedR>& r,
                                                const Eigen::MatrixBase<DerivedB>& b, typename DerivedZ::Scalar lambda,
                                                typename DerivedZ::Scalar alpha_mix) {
  using Scalar = typename DerivedZ::Scalar;
  const Scalar n = static_cast<Scalar>(Z.rows());
  const Scalar fit_term = (r - Z * b).squaredNorm() / (Scalar(2) * n);
  const Scalar penalty = lambda * (alpha_mix * b.template lpNorm<1>() + (Scalar(1) - alpha_mix) / Scalar(2) * b.squaredNorm());
  return fit_term + penalty;
}

/// Elastic net via cyclic coordinate descent with soft-thresholding.
/// Columns are standardized internally (population standard deviation);
/// coefficients are returned in original units. Converged when the largest
/// standardized coefficient change in a sweep is below `tol`. Constant
/// columns get a zero coefficient.
template <typename DerivedX, typename DerivedY>
ElasticNetSolution<typename DerivedX::Scalar> elastic_net_solve(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
    const ElasticNetOptions<typename DerivedX::Scalar>& opts) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (n < 2) throw Error(ErrorCode::TooFewRows, "elastic net needs at least 2 rows");
  if (!(opts.lambda >= Scalar(0)) || !(opts.alpha_mix >= Scalar(0) && opts.alpha_mix <= Scalar(1)) ||
      !(opts.tol > Scalar(0)) || opts.max_iter <= 0) {
    throw Error(ErrorCode::InvalidArgument, "elastic net requires lambda >= 0, alpha_mix in [0,1], tol > 0, max_iter > 0");
  }

  const Scalar nn = static_cast<Scalar>(n);
  const Vec<Scalar> x_mean = X.colwise().mean().transpose();
  const Scalar y_mean = y.mean();
  Mat<Scalar> Z = X.rowwise() - x_mean.transpose();
  Vec<Scalar> sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    sd(j) = std::sqrt(Z.col(j).squaredNorm() / nn);
    const Scalar raw = std::sqrt(X.col(j).squaredNorm() / nn);
    if (!(sd(j) > Scalar(1e-12) * raw)) sd(j) = Scalar(0);
    if (sd(j) > Scalar(0)) Z.col(j) /= sd(j);
  }
  const Vec<Scalar> target = y.array() - y_mean;
  Vec<Scalar> zz(p);
  for (Eigen::Index j = 0; j < p; ++j) zz(j) = Z.col(j).squaredNorm() / nn;

  const Scalar l1 = opts.lambda * opts.alpha_mix;
  const Scalar l2 = opts.lambda * (Scalar(1) - opts.alpha_mix);

  ElasticNetSolution<Scalar> out;
  Vec<Scalar> b = Vec<Scalar>::Zero(p);
  Vec<Scalar> residual = target;
  out.objective_trace.push_back(elastic_net_objective(Z, target, b, opts.lambda, opts.alpha_mix));

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Scalar max_change = Scalar(0);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!(sd(j) > Scalar(0))) continue;
      const Scalar old = b(j);
      const Scalar rho = Z.col(j).dot(residual) / nn + zz(j) * old;
      const Scalar updated = soft_threshold(rho, l1) / (zz(j) + l2);
      if (updated != old) {
        residual.noalias() -= (updated - old) * Z.col(j);
        b(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    out.objective_trace.push_back(elastic_net_objective(Z, target, b, opts.lambda, opts.alpha_mix));
    out.iterations = iter;
    if (max_change < opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.fit.coefficients = Vec<Scalar>::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (sd(j) > Scalar(0)) out.fit.coefficients(j) = b(j) / sd(j);
  }
  out.fit.intercept = y_mean - x_mean.dot(out.fit.coefficients);
  return out;
}

template <typename Scalar>
struct NigPrior {
  Scalar tau = Scalar(1e-6);  // prior precision scale, Lambda_0 = tau * I
  Scalar a0 = Scalar(1e-3);
  Scalar b0 = Scalar(1e-3);
};

template <typename Scalar>
struct NigPosterior {
  Vec<Scalar> mean;
  Mat<Scalar> precision;
  Scalar shape = Scalar(0);
  Scalar rate = Scalar(0);

  /// Posterior covariance of the coefficients up to the noise scale,
  /// i.e. precision^-1.
  Mat<Scalar> precision_inverse() const {
    Eigen::LLT<Mat<Scalar>> llt(precision);
    return llt.solve(Mat<Scalar>::Identity(precision.rows(), precision.cols()));
  }

  /// Exact marginal variances of the coefficients (Student-t marginals with
  /// 2*shape dof); infinite when shape <= 1.
  Vec<Scalar> coefficient_variance() const {
    Vec<Scalar> diag = precision_inverse().diagonal();
    if (!(shape > Scalar(1))) return Vec<Scalar>::Constant(diag.size(), std::numeric_limits<Scalar>::infinity());
    return diag * (rate / (shape - Scalar(1)));
  }

  /// Marginal Student-t scales, sqrt(diag(precision^-1) * rate / shape).
  Vec<Scalar> coefficient_scale() const { return (precision_inverse().diagonal() * (rate / shape)).cwiseSqrt(); }
};

/// Conjugate normal-inverse-gamma update with zero prior mean on a raw
/// regressor matrix (no intercept column is added here):
///   Lambda_n = X'X + tau I,  m_n = Lambda_n^-1 X'y,
///   a_n = a0 + n/2,          b_n = b0 + (y'y - m_n' Lambda_n m_n) / 2.
/// b_n is evaluated as b0 + (||y - X m_n||^2 + tau ||m_n||^2) / 2, which is
/// the same quantity without the cancellation.
template <typename DerivedX, typename DerivedY>
NigPosterior<typename DerivedX::Scalar> conjugate_update(const Eigen::MatrixBase<DerivedX>& X,
                                                          const Eigen::MatrixBase<DerivedY>& y,
                                                          const NigPrior<typename DerivedX::Scalar>& prior) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (!(prior.tau > Scalar(0)) || !(prior.a0 > Scalar(0)) || !(prior.b0 > Scalar(0))) {
    throw Error(ErrorCode::InvalidArgument, "prior requires tau > 0, a0 > 0, b0 > 0");
  }

  NigPosterior<Scalar> post;
  post.precision = Mat<Scalar>::Zero(X.cols(), X.cols());
  post.precision.template selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  post.precision.template triangularView<Eigen::StrictlyUpper>() = post.precision.transpose();
  post.precision.diagonal().array() += prior.tau;
  Eigen::LLT<Mat<Scalar>> llt(post.precision);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalInstability, "posterior precision factorization failed");
  post.mean = llt.solve(X.transpose() * y);
  if (!post.mean.allFinite()) throw Error(ErrorCode::NumericalInstability, "posterior mean is not finite");

  post.shape = prior.a0 + static_cast<Scalar>(n) / Scalar(2);
  post.rate = prior.b0 + ((y - X * post.mean).squaredNorm() + prior.tau * post.mean.squaredNorm()) / Scalar(2);
  return post;
}

}  // namespace linkreg
