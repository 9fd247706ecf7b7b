// linkreg: command-line front end over the library and the HTTP service.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "linkreg/error.hpp"
#include "linkreg/evaluation.hpp"
#include "linkreg/ingestion.hpp"
#include "linkreg/model_io.hpp"
#include "linkreg/regression.hpp"
#include "linkreg/service.hpp"
#include "linkreg/store.hpp"
#include "linkreg/synthetic.hpp"
#include "linkreg/whatif.hpp"

namespace fs = std::filesystem;
using namespace linkreg;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string default_store() {
  if (const char* env = std::getenv("LINKREG_STORE")) return env;
  return "store";
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(std::string(flag) + " expects name=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number for " + what + ": '" + text + "'");
  }
}

Timestamp parse_time(const std::string& text, const std::string& what) {
  auto t = Timestamp::parse_flexible(text);
  if (!t) throw UsageError("bad time for " + what + ": '" + text + "' (use HH:MM or YYYY-MM-DDTHH:MM)");
  return *t;
}

// name=...,target=...,value=...,start=...,end=...[,gate=...]
EventOverride parse_event(const std::string& spec) {
  EventOverride event;
  bool has_target = false, has_value = false, has_start = false, has_end = false;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto [key, value] = split_assignment(item, "--event");
    if (key == "name") {
      event.name = value;
    } else if (key == "target") {
      event.target_feature = value;
      has_target = true;
    } else if (key == "value" || key == "value_kmh") {
      event.value_kmh = parse_number(value, "event value");
      has_value = true;
    } else if (key == "start") {
      event.start = parse_time(value, "event start");
      has_start = true;
    } else if (key == "end") {
      event.end = parse_time(value, "event end");
      has_end = true;
    } else if (key == "gate") {
      event.gate_feature = value;
    } else {
      throw UsageError("unknown --event key '" + key + "'");
    }
  }
  if (!has_target || !has_value || !has_start || !has_end) {
    throw UsageError("--event needs target, value, start and end");
  }
  if (event.name.empty()) event.name = event.target_feature + "@" + event.start.to_string();
  validate(event);
  return event;
}

// "9-22" or "7,8,16-18"
HourSet parse_hours(const std::string& text) {
  HourSet hours;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    int lo = 0, hi = 0;
    try {
      lo = std::stoi(item.substr(0, dash));
      hi = dash == std::string::npos ? lo : std::stoi(item.substr(dash + 1));
    } catch (const std::exception&) {
      throw UsageError("bad hour list '" + text + "'");
    }
    if (lo < 0 || hi > 23 || lo > hi) throw UsageError("hours must lie in 0..23: '" + text + "'");
    for (int h = lo; h <= hi; ++h) hours.set(static_cast<std::size_t>(h));
  }
  return hours;
}

FittedModel resolve_model(const std::string& store_dir, const std::string& ref) {
  if (fs::is_regular_file(ref)) return load_model(ref);
  Store store(store_dir);
  return store.model(ref);
}

void print_report(const Json& report, const std::string& id) {
  std::cout << "model " << id << "  solver " << report.at("solver").get<std::string>() << "  dependent "
            << report.at("dependent").get<std::string>() << "  rows " << report.at("rows").get<std::size_t>() << "\n";
  const bool has_sd = report.at("intercept").contains("sd");
  std::cout << pad("feature", 14) << pad("kind", 10) << pad("estimate", 12) << (has_sd ? "sd" : "") << "\n";
  auto row = [&](const std::string& name, const std::string& kind, const Json& entry) {
    std::cout << pad(name, 14) << pad(kind, 10) << pad(fixed(entry.at("estimate").get<double>()), 12);
    if (has_sd) std::cout << fixed(entry.at("sd").get<double>());
    std::cout << "\n";
  };
  row("(intercept)", "", report.at("intercept"));
  for (const Json& c : report.at("coefficients")) {
    if (report.at("solver") == "baseline") break;
    row(c.at("name").get<std::string>(), c.at("kind").get<std::string>(), c);
  }
  if (!report.at("converged").get<bool>()) std::cout << "warning: elastic net did not converge\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatiotemporal link-speed regression: ingest, extract, fit, evaluate, predict, serve"};
  app.require_subcommand(1);

  std::string store_dir = default_store();
  std::string format = "table";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "machine"}));
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and its files and add them to the store");
  std::string manifest_path;
  ingest->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  ingest->add_option("--out,--store", store_dir, "Store directory");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract temporal features for a stored dataset");
  std::string dataset_id;
  std::vector<std::string> kinds;
  std::vector<std::string> explicit_specs;
  extract->add_option("--dataset", dataset_id, "Dataset id")->required();
  extract->add_option("--store", store_dir, "Store directory");
  extract->add_option("--kind", kinds, "peakhour or am (repeatable)")->check(CLI::IsMember({"peakhour", "am"}));
  extract->add_option("--explicit", explicit_specs, "NAME=HOURS, e.g. Rush=7-9,16-18 (repeatable)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a stored dataset");
  std::string solver_name;
  ElasticNetParams elastic;
  BayesPrior prior;
  fit_cmd->add_option("--dataset", dataset_id, "Dataset id")->required();
  fit_cmd->add_option("--solver", solver_name, "ols | elastic_net | bayesian | baseline")
      ->required()
      ->check(CLI::IsMember({"ols", "elastic_net", "bayesian", "baseline"}));
  fit_cmd->add_option("--store", store_dir, "Store directory");
  fit_cmd->add_option("--lambda", elastic.lambda, "Elastic net penalty")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--alpha-mix", elastic.alpha_mix, "Elastic net L1 share")->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--tol", elastic.tol, "Elastic net tolerance")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-iter", elastic.max_iter, "Elastic net sweep limit")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tau", prior.tau, "Bayesian prior precision")->check(CLI::PositiveNumber);
  add_format(fit_cmd);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compare all solvers on a train/test split");
  SplitOptions split_opts;
  evaluate->add_option("--dataset", dataset_id, "Dataset id")->required();
  evaluate->add_option("--store", store_dir, "Store directory");
  evaluate->add_option("--test-fraction", split_opts.test_fraction, "Held-out share")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--seed", split_opts.seed, "Shuffle seed");
  evaluate->add_flag("--chronological", split_opts.chronological, "Hold out the latest rows instead of shuffling");
  evaluate->add_option("--lambda", elastic.lambda, "Elastic net penalty")->check(CLI::NonNegativeNumber);
  evaluate->add_option("--alpha-mix", elastic.alpha_mix, "Elastic net L1 share")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--tau", prior.tau, "Bayesian prior precision")->check(CLI::PositiveNumber);
  add_format(evaluate);

  // predict
  auto* predict = app.add_subcommand("predict", "Predict the dependent link for given inputs");
  std::string model_ref;
  std::string at_text;
  std::vector<std::string> sets;
  std::vector<std::string> event_specs;
  predict->add_option("--model", model_ref, "Model id or model file")->required();
  predict->add_option("--store", store_dir, "Store directory");
  predict->add_option("--at", at_text, "Clock time HH:MM or ISO-8601 date-time");
  predict->add_option("--set", sets, "name=value (repeatable)");
  predict->add_option("--event", event_specs, "name=..,target=..,value=..,start=..,end=..[,gate=..] (repeatable)");
  add_format(predict);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string listen = "127.0.0.1:8080";
  ServiceConfig service_cfg;
  std::string ui_dir;
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--store", store_dir, "Store directory");
  serve->add_option("--ui", ui_dir, "Directory of static UI files served under /");
  serve->add_option("--cors", service_cfg.cors_origin, "Access-Control-Allow-Origin value");
  serve->add_option("--upload-limit", service_cfg.upload_limit_bytes, "Maximum request body in bytes");
  serve->add_option("--id-seed", service_cfg.id_seed, "Seed mixed into content ids");

  // synth
  auto* synth = app.add_subcommand("synth", "Write the synthetic four-link example dataset");
  std::string synth_out;
  FourLinkScenario scenario;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", scenario.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      Store store(store_dir);
      std::cout << store.import_dataset(manifest_path) << "\n";
      return 0;
    }

    if (*extract) {
      std::vector<TemporalRequest> requests;
      for (const auto& k : kinds) requests.push_back({*parse_temporal_kind(k), "", {}});
      for (const auto& spec : explicit_specs) {
        auto [name, hours] = split_assignment(spec, "--explicit");
        requests.push_back({TemporalKind::explicit_hours, name, parse_hours(hours)});
      }
      if (requests.empty()) throw UsageError("extract needs at least one --kind or --explicit");
      Store store(store_dir);
      for (const auto& f : store.add_features(dataset_id, requests)) {
        std::cout << f.name << "  kind " << to_string(f.definition.kind) << "  hours "
                  << hours_to_json(f.definition.active_hours).dump();
        if (f.definition.threshold) std::cout << "  threshold " << fixed(*f.definition.threshold);
        std::cout << "\n";
      }
      return 0;
    }

    if (*fit_cmd) {
      Store store(store_dir);
      const auto dataset = store.dataset(dataset_id);
      const FittedModel model = fit(align(*dataset), *parse_solver(solver_name), elastic, prior);
      const std::string id = store.put_model(model, {dataset_id});
      Json report = model_report(model);
      if (format == "machine") {
        report["id"] = id;
        report["dataset"] = dataset_id;
        std::cout << report.dump() << "\n";
      } else {
        print_report(report, id);
      }
      return 0;
    }

    if (*evaluate) {
      Store store(store_dir);
      const auto rows = compare_models(align(*store.dataset(dataset_id)), split_opts, elastic, prior);
      if (format == "machine") {
        Json out = Json::array();
        for (const auto& r : rows) out.push_back({{"solver", std::string(to_string(r.solver))}, {"mae", r.mae}, {"rmse", r.rmse}});
        std::cout << out.dump() << "\n";
      } else {
        std::cout << pad("solver", 14) << pad("MAE", 12) << "RMSE\n";
        for (const auto& r : rows) {
          std::cout << pad(std::string(to_string(r.solver)), 14) << pad(fixed(r.mae, 5), 12) << fixed(r.rmse, 5) << "\n";
        }
      }
      return 0;
    }

    if (*predict) {
      const FittedModel model = resolve_model(store_dir, model_ref);
      WhatIfRequest request;
      for (const auto& s : sets) {
        auto [name, value] = split_assignment(s, "--set");
        request.inputs[name] = parse_number(value, name);
      }
      if (!at_text.empty()) request.at = parse_time(at_text, "--at");
      for (const auto& spec : event_specs) request.events.push_back(parse_event(spec));
      const WhatIfResult result = run_what_if(model, request);
      if (format == "machine") {
        std::cout << what_if_to_json(model, result).dump() << "\n";
        return 0;
      }
      const std::string dependent = model.training.dependent_name.empty() ? "prediction" : model.training.dependent_name;
      std::cout << dependent << " = " << fixed(result.point.value_kmh, 2) << " km/h";
      if (result.point.clamped) std::cout << " (clamped from " << fixed(result.point.raw_kmh, 2) << ")";
      std::cout << "\n";
      for (const auto& e : result.applied_events) {
        std::cout << "event " << e.name << ": " << e.target_feature << " = " << fixed(e.value_kmh, 2) << " km/h\n";
      }
      if (result.distribution) {
        const auto [lo, hi] = result.distribution->interval(kReportedIntervalLevel);
        std::cout << "99% interval: [" << fixed(lo, 2) << ", " << fixed(hi, 2) << "] km/h  (Student-t, dof "
                  << fixed(result.distribution->dof, 1) << ", scale " << fixed(result.distribution->scale, 3) << ")\n";
      }
      return 0;
    }

    if (*serve) {
      const auto colon = listen.rfind(':');
      const std::string host = colon == std::string::npos || colon == 0 ? "0.0.0.0" : listen.substr(0, colon);
      int port = 0;
      try {
        port = std::stoi(colon == std::string::npos ? listen : listen.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("bad --listen '" + listen + "'");
      }
      service_cfg.store_dir = store_dir;
      if (!ui_dir.empty()) service_cfg.ui_dir = ui_dir;
      Service service(service_cfg);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::Io, "cannot listen on " + listen);
      std::cerr << "listening on " << host << ":" << bound << "\n";

      static std::atomic<bool> interrupted{false};
      std::signal(SIGINT, [](int) { interrupted = true; });
      std::signal(SIGTERM, [](int) { interrupted = true; });
      std::thread watcher([&] {
        while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
      });
      server.run();
      interrupted = true;
      watcher.join();
      return 0;
    }

    if (*synth) {
      const Dataset dataset = generate_four_link(scenario);
      write_dataset_files(dataset, synth_out,
                          {{TemporalKind::peakhour, "Peakhour", {}}, {TemporalKind::am, "AM", {}}});
      std::cout << "wrote " << dataset.spatial.size() << " links to " << synth_out << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
