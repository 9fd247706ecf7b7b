#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "linkreg/error.hpp"
#include "linkreg/regression.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

namespace detail {
template <typename DerivedA, typename DerivedB>
void check_metric_args(const Eigen::MatrixBase<DerivedA>& pred, const Eigen::MatrixBase<DerivedB>& truth) {
  if (pred.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "predictions and truth differ in length");
  if (pred.size() == 0) throw Error(ErrorCode::Empty, "no observations");
}
}  // namespace detail

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar mae(const Eigen::MatrixBase<DerivedA>& pred, const Eigen::MatrixBase<DerivedB>& truth) {
  detail::check_metric_args(pred, truth);
  return (pred - truth).cwiseAbs().mean();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rmse(const Eigen::MatrixBase<DerivedA>& pred, const Eigen::MatrixBase<DerivedB>& truth) {
  detail::check_metric_args(pred, truth);
  using std::sqrt;
  return sqrt((pred - truth).squaredNorm() / static_cast<typename DerivedA::Scalar>(pred.size()));
}

struct SplitOptions {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool chronological = false;  // hold out the latest rows instead of a shuffle
};

/// Test size floor(n * f), train the rest. Requires n >= 4 and both sides
/// non-empty. The shuffled split is a Fisher-Yates permutation driven by a
/// seeded mt19937_64, identical on every platform.
std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& design, const SplitOptions& options);

struct ComparisonRow {
  Solver solver;
  double mae = 0.0;
  double rmse = 0.0;
};

/// Fits ols, elastic_net, bayesian and baseline on the train split and scores
/// each on the test split, in that order.
std::vector<ComparisonRow> compare_models(const DesignMatrix& design, const SplitOptions& options,
                                          const ElasticNetParams& elastic = {}, const BayesPrior& prior = {});

}  // namespace linkreg
