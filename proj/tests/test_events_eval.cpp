#include <gtest/gtest.h>

#include <random>
#include <set>

#include "linkreg/error.hpp"
#include "linkreg/evaluation.hpp"
#include "linkreg/events.hpp"
#include "oracles.hpp"

using namespace linkreg;
using std::chrono::minutes;

namespace {

const Timestamp kT0 = Timestamp::from_civil(2020, 3, 2, 9);

EventOverride ev(std::string name, std::string target, double value, int start, int end,
                 std::optional<std::string> gate = std::nullopt) {
  return {std::move(name), std::move(target), value, kT0 + minutes(start), kT0 + minutes(end), std::move(gate)};
}

}  // namespace

TEST(Events, HalfOpenWindow) {
  const FeatureValues in = {{"Road3", 30.0}};
  const std::vector<EventOverride> es = {ev("closure", "Road3", 2.0, 0, 60)};
  EXPECT_EQ(apply_events(in, es, kT0 - minutes(1)).at("Road3"), 30.0);
  EXPECT_EQ(apply_events(in, es, kT0).at("Road3"), 2.0);
  EXPECT_EQ(apply_events(in, es, kT0 + minutes(59)).at("Road3"), 2.0);
  EXPECT_EQ(apply_events(in, es, kT0 + minutes(60)).at("Road3"), 30.0);
}

TEST(Events, LatestStartWinsThenTieBreaks) {
  const FeatureValues in = {{"A", 30.0}};
  EXPECT_EQ(apply_events(in, {ev("x", "A", 1, 0, 60), ev("y", "A", 2, 10, 20)}, kT0 + minutes(15)).at("A"), 2.0);
  EXPECT_EQ(apply_events(in, {ev("x", "A", 1, 0, 60), ev("y", "A", 2, 0, 30)}, kT0 + minutes(15)).at("A"), 1.0);
  EXPECT_EQ(apply_events(in, {ev("b", "A", 1, 0, 60), ev("a", "A", 2, 0, 60)}, kT0).at("A"), 1.0);
  EXPECT_EQ(apply_events(in, {ev("a", "A", 1, 0, 60), ev("a", "A", 2, 0, 60)}, kT0).at("A"), 2.0);
}

TEST(Events, GateFeature) {
  const TemporalCalendar cal = {{"Peakhour", TemporalRule{TemporalKind::peakhour, HourSet(0x7FFE00), {}}}};
  const FeatureValues in = {{"A", 30.0}};
  const std::vector<EventOverride> es = {ev("g", "A", 5, -600, 600, "Peakhour")};
  EXPECT_EQ(apply_events(in, es, kT0, cal).at("A"), 5.0);                // 09:00
  EXPECT_EQ(apply_events(in, es, kT0 - minutes(120), cal).at("A"), 30.0);  // 07:00
  EXPECT_THROW(apply_events(in, es, kT0, {}), Error);
}

TEST(Events, UnknownTarget) {
  try {
    apply_events({{"A", 1.0}}, {ev("x", "B", 1, 0, 60)}, kT0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTarget);
  }
}

TEST(Events, PropertyRandomConfigurations) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> slot(0, 6), pick(0, 1), count(0, 5);
  const FeatureValues in = {{"A", 30.0}, {"B", 40.0}};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<EventOverride> es;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      const int s = slot(rng);
      es.push_back(ev(pick(rng) ? "p" : "q", pick(rng) ? "A" : "B", slot(rng), 10 * s, 10 * (s + 1 + slot(rng))));
    }
    const Timestamp at = kT0 + minutes(10 * slot(rng));
    const FeatureValues once = apply_events(in, es, at);
    EXPECT_EQ(apply_events(once, es, at), once);
    auto shuffled = es;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(apply_events(in, shuffled, at), once);
    for (const auto& [name, value] : once) {
      if (value != in.at(name)) {
        bool explained = false;
        for (const auto& e : es) explained |= e.target_feature == name && e.value_kmh == value && e.start <= at && at < e.end;
        EXPECT_TRUE(explained);
      }
    }
  }
}

TEST(Metrics, HandExamples) {
  Eigen::VectorXd p(2), t(2);
  p << 1, 2;
  t << 2, 4;
  EXPECT_DOUBLE_EQ(mae(p, t), 1.5);
  EXPECT_NEAR(rmse(p, t), std::sqrt(2.5), 1e-15);
  EXPECT_THROW(mae(Eigen::VectorXd(0), Eigen::VectorXd(0)), Error);
  EXPECT_THROW(rmse(p, Eigen::VectorXd(3)), Error);
}

TEST(Metrics, RmseDominatesMae) {
  std::mt19937 rng(22);
  std::normal_distribution<double> g(0, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd a(17), b(17);
    for (int i = 0; i < 17; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    EXPECT_GE(rmse(a, b), mae(a, b) * (1 - 1e-15));
  }
}

namespace {

DesignMatrix indexed_design(int n) {
  DesignMatrix d;
  d.columns = {"x"};
  d.X = Eigen::VectorXd::LinSpaced(n, 0, n - 1);
  d.y = d.X.col(0) * 2.0;
  for (int i = 0; i < n; ++i) d.timestamps.push_back(kT0 + minutes(15 * i));
  return d;
}

}  // namespace

TEST(Split, SizesAndPartition) {
  const DesignMatrix d = indexed_design(10);
  const auto [train, test] = split(d, {0.25, 7, false});
  EXPECT_EQ(test.rows(), 2);
  EXPECT_EQ(train.rows(), 8);
  std::set<double> seen;
  for (Eigen::Index i = 0; i < train.rows(); ++i) seen.insert(train.X(i, 0));
  for (Eigen::Index i = 0; i < test.rows(); ++i) seen.insert(test.X(i, 0));
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Split, DeterministicForSeed) {
  const DesignMatrix d = indexed_design(50);
  const auto a = split(d, {0.2, 3, false});
  const auto b = split(d, {0.2, 3, false});
  const auto c = split(d, {0.2, 4, false});
  EXPECT_EQ(a.second.X, b.second.X);
  EXPECT_NE(a.second.X, c.second.X);
}

TEST(Split, ChronologicalHoldsOutTheEnd) {
  const DesignMatrix d = indexed_design(10);
  const auto [train, test] = split(d, {0.2, 0, true});
  ASSERT_EQ(test.rows(), 2);
  EXPECT_EQ(test.X(0, 0), 8.0);
  EXPECT_EQ(test.X(1, 0), 9.0);
  EXPECT_EQ(train.X(7, 0), 7.0);
  EXPECT_EQ(test.timestamps.front(), d.timestamps[8]);
}

TEST(Split, RejectsDegenerate) {
  EXPECT_THROW(split(indexed_design(3), {}), Error);
  EXPECT_THROW(split(indexed_design(10), {0.01, 0, false}), Error);
  EXPECT_THROW(split(indexed_design(10), {1.0, 0, false}), Error);
}

TEST(Compare, FourRowsInOrder) {
  std::mt19937 rng(23);
  const auto inst = oracle::random_instance(rng);
  DesignMatrix d;
  d.X = inst.X;
  d.y = inst.y;
  for (Eigen::Index j = 0; j < inst.X.cols(); ++j) d.columns.push_back("x" + std::to_string(j));
  const auto rows = compare_models(d, {});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].solver, Solver::ols);
  EXPECT_EQ(rows[3].solver, Solver::baseline);
  for (const auto& r : rows) EXPECT_GE(r.rmse, r.mae);
}
