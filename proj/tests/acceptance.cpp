// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and must not be loosened.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "linkreg/evaluation.hpp"
#include "linkreg/events.hpp"
#include "linkreg/features.hpp"
#include "linkreg/ingestion.hpp"
#include "linkreg/model_io.hpp"
#include "linkreg/regression.hpp"
#include "linkreg/service.hpp"
#include "linkreg/solvers.hpp"
#include "oracles.hpp"

// After Eigen: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace fs = std::filesystem;
using namespace linkreg;

namespace {

const fs::path kDataDir = LINKREG_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& out, bool condition, const std::string& what) {
  if (!condition && out.pass) {
    out.pass = false;
    out.detail = what;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

DesignMatrix as_design(const oracle::Instance& inst) {
  DesignMatrix d;
  d.X = inst.X;
  d.y = inst.y;
  for (Eigen::Index j = 0; j < inst.X.cols(); ++j) d.columns.push_back("x" + std::to_string(j));
  d.dependent_name = "y";
  return d;
}

std::vector<oracle::Instance> hundred_instances() {
  std::mt19937 rng(1234);
  std::vector<oracle::Instance> out;
  for (int i = 0; i < 100; ++i) out.push_back(oracle::random_instance(rng));
  return out;
}

Outcome ols_oracle() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& inst : hundred_instances()) {
    const FittedModel m = fit_ols(as_design(inst));
    const Eigen::VectorXd ref = oracle::pinv_least_squares(inst.X, inst.y);
    worst = std::max(worst, std::abs(m.intercept - ref(0)));
    worst = std::max(worst, (m.coefficients - ref.tail(inst.X.cols())).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(t0);
  require(out, worst <= 1e-8, "max abs diff " + fmt(worst));
  require(out, elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
  if (out.pass) out.detail = "max abs diff " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return out;
}

Outcome bayes_flat_limit() {
  Outcome out;
  double worst = 0.0;
  for (const auto& inst : hundred_instances()) {
    const DesignMatrix d = as_design(inst);
    const FittedModel ols = fit_ols(d);
    const FittedModel bayes = fit_bayesian(d, BayesPrior{1e-6, 1e-3, 1e-3});
    worst = std::max(worst, std::abs(bayes.intercept - ols.intercept) / std::abs(ols.intercept));
    for (Eigen::Index j = 0; j < ols.coefficients.size(); ++j) {
      worst = std::max(worst, std::abs(bayes.coefficients(j) - ols.coefficients(j)) / std::abs(ols.coefficients(j)));
    }
  }
  require(out, worst <= 1e-4, "max relative diff " + fmt(worst));
  if (out.pass) out.detail = "max relative diff " + fmt(worst);
  return out;
}

Outcome bayes_quadrature() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd x(5), y(5);
  x << 1.0, 2.0, 3.0, 4.0, 5.0;
  y << 2.0, 1.5, 4.2, 3.1, 6.0;
  const NigPrior<double> prior{1e-6, 1e-3, 1e-3};
  const NigPosterior<double> post = conjugate_update(Eigen::MatrixXd(x), y, prior);
  const double mean = post.mean(0);
  const double variance = post.coefficient_variance()(0);
  const oracle::Moments grid = oracle::nig_grid_moments(x, y, prior.tau, prior.a0, prior.b0, 2000);
  const double elapsed = seconds_since(t0);
  const double d_mean = std::abs(mean - grid.mean);
  const double d_var = std::abs(variance - grid.variance);
  require(out, d_mean <= 1e-3, "mean " + fmt(mean) + " vs grid " + fmt(grid.mean));
  require(out, d_var <= 1e-3, "variance " + fmt(variance) + " vs grid " + fmt(grid.variance));
  require(out, elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
  if (out.pass) {
    out.detail = "mean " + fmt(mean) + " (grid " + fmt(grid.mean) + "), variance " + fmt(variance) + " (grid " +
                 fmt(grid.variance) + "), " + fmt(elapsed) + " s";
  }
  return out;
}

Outcome elastic_net() {
  Outcome out;
  // lambda = 0 against OLS.
  double worst_ols = 0.0;
  for (const auto& inst : hundred_instances()) {
    const DesignMatrix d = as_design(inst);
    const FittedModel ols = fit_ols(d);
    const FittedModel en = fit_elastic_net(d, ElasticNetParams{0.0, 0.5, 1e-12, 100000});
    worst_ols = std::max(worst_ols, std::abs(en.intercept - ols.intercept));
    worst_ols = std::max(worst_ols, (en.coefficients - ols.coefficients).cwiseAbs().maxCoeff());
  }
  require(out, worst_ols <= 1e-6, "lambda=0 vs OLS max abs diff " + fmt(worst_ols));

  // Single coordinate against the closed form.
  std::mt19937 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_single = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + trial;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    const double slope = 3.0 * gauss(rng);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 5.0 + 2.0 * gauss(rng);
      y(i) = 1.0 + slope * X(i, 0) + gauss(rng);
    }
    const double lambda = 2.0 * unif(rng);
    const double mix = unif(rng);
    const auto sol = elastic_net_solve(X, y, ElasticNetOptions<double>{lambda, mix, 1e-7, 10000});
    const auto [a, b] = oracle::elastic_net_single(X.col(0), y, lambda, mix);
    worst_single = std::max({worst_single, std::abs(sol.fit.intercept - a), std::abs(sol.fit.coefficients(0) - b)});
  }
  require(out, worst_single <= 1e-10, "single-coordinate max abs diff " + fmt(worst_single));

  // Objective never increases across sweeps.
  std::mt19937 rng2(99);
  int non_monotone = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Instance inst = oracle::random_instance(rng2);
    const auto sol = elastic_net_solve(inst.X, inst.y, ElasticNetOptions<double>{0.05 + 0.1 * trial, 0.5, 1e-7, 10000});
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
      const double prev = sol.objective_trace[k - 1];
      if (sol.objective_trace[k] > prev + 1e-12 * std::abs(prev)) ++non_monotone;
    }
  }
  require(out, non_monotone == 0, std::to_string(non_monotone) + " objective increases");
  if (out.pass) {
    out.detail = "lambda=0 diff " + fmt(worst_ols) + ", closed-form diff " + fmt(worst_single) + ", monotone on 20";
  }
  return out;
}

Outcome metrics() {
  Outcome out;
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> len(1, 50);
  std::normal_distribution<double> gauss(0.0, 10.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = gauss(rng);
      b(i) = gauss(rng);
    }
    const double m = mae(a, b);
    const double r = rmse(a, b);
    if (r < m * (1.0 - 1e-15)) ++violations;
  }
  require(out, violations == 0, std::to_string(violations) + " pairs with rmse < mae");
  Eigen::VectorXd pred(2), truth(2);
  pred << 1.0, 2.0;
  truth << 2.0, 4.0;
  require(out, mae(pred, truth) == 1.5, "hand MAE " + fmt(mae(pred, truth)));
  require(out, std::abs(rmse(pred, truth) - 1.58114) <= 1e-5, "hand RMSE " + fmt(rmse(pred, truth)));
  if (out.pass) out.detail = "1000 pairs, hand MAE 1.5, RMSE " + fmt(rmse(pred, truth));
  return out;
}

Outcome table_analogue() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = load_dataset(kDataDir / "example" / "manifest.json");
  const DesignMatrix design = align(ds);
  require(out, design.rows() == 672, "rows " + std::to_string(design.rows()));
  const auto rows = compare_models(design, SplitOptions{});
  std::map<Solver, ComparisonRow> by;
  for (const auto& r : rows) by[r.solver] = r;
  const auto& ols = by.at(Solver::ols);
  const auto& en = by.at(Solver::elastic_net);
  const auto& bayes = by.at(Solver::bayesian);
  const auto& base = by.at(Solver::baseline);
  const double rel_rmse = std::abs(bayes.rmse - ols.rmse) / ols.rmse;
  const double rel_mae = std::abs(bayes.mae - ols.mae) / ols.mae;
  require(out, rel_rmse <= 0.02 && rel_mae <= 0.02, "bayesian vs ols differ by " + fmt(std::max(rel_rmse, rel_mae)));
  require(out, ols.rmse <= en.rmse && bayes.rmse <= en.rmse, "elastic net RMSE not the larger");
  require(out, ols.mae <= en.mae && bayes.mae <= en.mae, "elastic net MAE not the larger");
  require(out, base.rmse >= 2.0 * bayes.rmse, "baseline RMSE " + fmt(base.rmse) + " < 2x " + fmt(bayes.rmse));
  const double elapsed = seconds_since(t0);
  require(out, elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  if (out.pass) {
    std::ostringstream s;
    s << "RMSE ols " << fmt(ols.rmse) << ", bayesian " << fmt(bayes.rmse) << ", elastic_net " << fmt(en.rmse)
      << ", baseline " << fmt(base.rmse) << ", " << fmt(elapsed) << " s";
    out.detail = s.str();
  }
  return out;
}

Outcome scenario() {
  Outcome out;
  FittedModel m;
  m.solver = Solver::ols;
  m.feature_order = {"AM", "Peakhour", "Road2", "Road3", "Road4"};
  m.coefficients = Eigen::VectorXd(5);
  m.coefficients << 1.7561, -2.7517, -0.0477, -0.0479, 0.7139;
  m.intercept = 7.4163;
  m.temporal_rules = {{"AM", am_rule()}, {"Peakhour", TemporalRule{TemporalKind::peakhour, HourSet(0x7FFE00), {}}}};
  const auto p = predict_point(m, {{"AM", 1}, {"Peakhour", 1}, {"Road2", 18.05}, {"Road3", 4.4}, {"Road4", 10.45}});
  require(out, std::abs(p.value_kmh - 12.81) <= 0.01, "prediction " + fmt(p.value_kmh));
  require(out, std::abs(p.value_kmh - 13.3) <= 1.0, "prediction " + fmt(p.value_kmh) + " too far from 13.3");
  if (out.pass) out.detail = "prediction " + fmt(p.value_kmh) + " km/h";
  return out;
}

std::vector<Timestamp> day_grid(int days) {
  std::vector<Timestamp> ts;
  const Timestamp start = Timestamp::from_civil(2021, 6, 1);
  for (int k = 0; k < days * 96; ++k) ts.push_back(start + std::chrono::minutes(15 * k));
  return ts;
}

SpatialFeature profile_feature(const std::string& name, const std::array<double, 24>& by_hour, int days) {
  SpatialFeature f;
  f.name = name;
  for (const auto& t : day_grid(days)) f.series.push_back({t, by_hour[static_cast<std::size_t>(t.hour())]});
  return f;
}

Outcome feature_extraction() {
  Outcome out;
  std::array<double, 24> means{};
  for (int h = 0; h < 24; ++h) means[static_cast<std::size_t>(h)] = (h >= 9 && h <= 22) ? 5.0 : 20.0;
  const HourlyProfile prof = hourly_profile(std::vector<SpatialFeature>{profile_feature("A", means, 2)});
  HourSet expected;
  for (int h = 9; h <= 22; ++h) expected.set(static_cast<std::size_t>(h));
  require(out, prof.threshold == 11.25, "threshold " + fmt(prof.threshold));
  require(out, prof.active_hours == expected, "active hours " + prof.active_hours.to_string());

  const auto ts = day_grid(3);
  bool binary = true;
  for (const auto& f : {extract_peakhour(prof, ts), extract_am(ts)}) {
    for (const auto& s : f.values) binary = binary && (s.indicator == 0 || s.indicator == 1);
  }
  require(out, binary, "non-binary indicator");

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> speed(2.0, 60.0);
  std::uniform_real_distribution<double> factor(0.05, 20.0);
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 24> a{}, b{}, c{};
    for (std::size_t h = 0; h < 24; ++h) {
      a[h] = speed(rng);
      b[h] = speed(rng);
    }
    const double k = factor(rng);
    const HourlyProfile base = hourly_profile(std::vector<SpatialFeature>{profile_feature("A", a, 1), profile_feature("B", b, 1)});
    for (std::size_t h = 0; h < 24; ++h) c[h] = k * a[h];
    std::array<double, 24> d{};
    for (std::size_t h = 0; h < 24; ++h) d[h] = k * b[h];
    const HourlyProfile scaled = hourly_profile(std::vector<SpatialFeature>{profile_feature("A", c, 1), profile_feature("B", d, 1)});
    if (scaled.active_hours != base.active_hours) ++mismatches;
  }
  require(out, mismatches == 0, std::to_string(mismatches) + " of 50 scaled profiles changed");
  if (out.pass) out.detail = "threshold 11.25, hours 9..22, scaling invariant on 50 profiles";
  return out;
}

Outcome events() {
  Outcome out;
  const Timestamp t0 = Timestamp::from_civil(2020, 3, 2, 8);
  const auto at = [&](int slot) { return t0 + std::chrono::minutes(30 * slot); };
  const std::vector<std::pair<int, int>> windows = {{0, 2}, {1, 3}, {0, 3}};
  const std::vector<std::string> targets = {"A", "B"};
  std::vector<EventOverride> pool;
  for (const auto& target : targets) {
    for (const auto& [s, e] : windows) {
      for (double value : {1.0, 2.0}) {
        for (const char* name : {"e", "f"}) pool.push_back({name, target, value, at(s), at(e), std::nullopt});
      }
    }
  }
  const FeatureValues inputs = {{"A", 30.0}, {"B", 40.0}, {"C", 50.0}};

  std::size_t configs = 0, failures = 0;
  for (int t = -1; t <= 3; ++t) {
    const Timestamp when = at(t);
    if (apply_events(inputs, {}, when) != inputs) ++failures;
  }
  for (const auto& e1 : pool) {
    for (const auto& e2 : pool) {
      for (const auto& e3 : pool) {
        std::vector<EventOverride> list = {e1, e2, e3};
        ++configs;
        for (int t = -1; t <= 3; ++t) {
          const Timestamp when = at(t);
          const FeatureValues once = apply_events(inputs, list, when);
          if (apply_events(once, list, when) != once) ++failures;
          std::vector<int> order = {0, 1, 2};
          while (std::next_permutation(order.begin(), order.end())) {
            std::vector<EventOverride> permuted = {list[order[0]], list[order[1]], list[order[2]]};
            if (apply_events(inputs, permuted, when) != once) ++failures;
          }
        }
      }
    }
  }
  require(out, failures == 0, std::to_string(failures) + " violations over " + std::to_string(configs) + " configurations");
  if (out.pass) out.detail = std::to_string(configs) + " configurations x 5 times, all permutations";
  return out;
}

Outcome service_round_trip() {
  Outcome out;
  const fs::path store = fs::temp_directory_path() / ("linkreg_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(store);
  ServiceConfig cfg;
  cfg.store_dir = store;
  Service service(cfg);
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  require(out, port > 0, "bind failed");
  if (!out.pass) return out;
  std::thread runner([&] { server.run(); });
  while (!server.running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  httplib::Client client("127.0.0.1", port);
  const fs::path dir = kDataDir / "example";
  httplib::MultipartFormDataItems items;
  items.push_back({"manifest", read_text_file(dir / "manifest.json"), "manifest.json", "application/json"});
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    items.push_back({"files", read_text_file(entry.path()), name, "application/octet-stream"});
  }
  std::string dataset_id, model_id;
  if (auto r = client.Post("/api/datasets", items); r && r->status == 201) {
    dataset_id = Json::parse(r->body).at("id").get<std::string>();
  } else {
    require(out, false, "dataset upload " + (r ? std::to_string(r->status) + " " + r->body : std::string("no response")));
  }
  if (out.pass) {
    const std::string body = R"({"features":[{"kind":"peakhour"},{"kind":"am"}]})";
    auto r = client.Post("/api/datasets/" + dataset_id + "/features", body, "application/json");
    require(out, r && r->status == 200, "feature extraction " + (r ? std::to_string(r->status) + " " + r->body : "no response"));
  }
  if (out.pass) {
    const std::string body = R"({"dataset":")" + dataset_id + R"(","solver":"bayesian"})";
    auto r = client.Post("/api/models", body, "application/json");
    if (r && r->status == 201) {
      const Json report = Json::parse(r->body);
      model_id = report.at("id").get<std::string>();
      require(out, report.at("coefficients").size() == 5, "coefficient count " + std::to_string(report.at("coefficients").size()));
    } else {
      require(out, false, "fit " + (r ? std::to_string(r->status) + " " + r->body : std::string("no response")));
    }
  }
  if (out.pass) {
    const std::string body = R"({"inputs":{"Road2":18.05,"Road3":4.4,"Road4":10.45},"time":"09:30"})";
    auto r1 = client.Post("/api/models/" + model_id + "/predict", body, "application/json");
    auto r2 = client.Post("/api/models/" + model_id + "/predict", body, "application/json");
    require(out, r1 && r1->status == 200 && r2 && r2->status == 200, "predict failed");
    if (out.pass) {
      require(out, r1->body == r2->body, "responses differ");
      const Json p = Json::parse(r1->body);
      require(out, p.contains("distribution") && p.at("distribution").at("density").size() == 200, "distribution missing");
      if (out.pass) out.detail = "prediction " + fmt(p.at("prediction").at("value_kmh").get<double>()) + " km/h, identical twice";
    }
  }
  server.stop();
  runner.join();
  fs::remove_all(store);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ols-pseudo-inverse-oracle", ols_oracle},
      {"bayesian-flat-prior-limit", bayes_flat_limit},
      {"bayesian-quadrature-oracle", bayes_quadrature},
      {"elastic-net", elastic_net},
      {"metrics", metrics},
      {"solver-comparison-ordering", table_analogue},
      {"intersection-scenario", scenario},
      {"feature-extraction", feature_extraction},
      {"events", events},
      {"service-round-trip", service_round_trip},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
