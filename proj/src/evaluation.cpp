#include "linkreg/evaluation.hpp"

#include <cmath>
#include <numeric>
#include <limits>
#include <random>

namespace linkreg {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& design, const SplitOptions& options) {
  const auto n = static_cast<std::size_t>(design.rows());
  if (n < 4) throw Error(ErrorCode::TooFewRows, "split needs at least 4 rows, got " + std::to_string(n));
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0,1)");
  }
  // the epsilon keeps e.g. 10 * 0.3 from flooring to 2
  const auto test_size = static_cast<std::size_t>(std::floor(static_cast<double>(n) * options.test_fraction + 1e-9));
  const std::size_t train_size = n - test_size;
  if (test_size == 0 || train_size == 0) {
    throw Error(ErrorCode::TooFewRows, "test fraction leaves an empty side for n = " + std::to_string(n));
  }

  std::vector<Eigen::Index> order(n);
  if (options.chronological) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Without timestamps, row order is taken as time order.
    if (design.timestamps.size() == n) {
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return design.timestamps[static_cast<std::size_t>(a)] < design.timestamps[static_cast<std::size_t>(b)];
      });
    }
  } else {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(bounded(rng, i + 1));
      std::swap(order[i], order[j]);
    }
  }
  std::vector<Eigen::Index> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::vector<Eigen::Index> test(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
  return {design.select_rows(train), design.select_rows(test)};
}

std::vector<ComparisonRow> compare_models(const DesignMatrix& design, const SplitOptions& options,
                                          const ElasticNetParams& elastic, const BayesPrior& prior) {
  const auto [train, test] = split(design, options);
  std::vector<ComparisonRow> rows;
  for (Solver solver : {Solver::ols, Solver::elastic_net, Solver::bayesian, Solver::baseline}) {
    const FittedModel model = fit(train, solver, elastic, prior);
    const Eigen::VectorXd pred = predict_rows(model, test.X);
    rows.push_back({solver, mae(pred, test.y), rmse(pred, test.y)});
  }
  return rows;
}

}  // namespace linkreg
