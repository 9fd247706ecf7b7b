#include "linkreg/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>

#include "linkreg/error.hpp"
#include "linkreg/ingestion.hpp"
#include "linkreg/regression.hpp"
#include "linkreg/whatif.hpp"

namespace linkreg {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDataset:
    case ErrorCode::UnknownModel: return 404;
    case ErrorCode::RankDeficient:
    case ErrorCode::TooFewRows:
    case ErrorCode::NumericalInstability:
    case ErrorCode::EmptyDesign:
    case ErrorCode::EmptyIntersection: return 422;
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

Json error_body(ErrorCode code, const std::string& message) {
  return Json{{"errors", Json::array({Json{{"code", std::string(to_string(code))}, {"message", message}}})}};
}

namespace {

ApiResponse failure(const Error& e) { return {http_status(e.code()), error_body(e.code(), e.detail())}; }

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return failure(e);
  } catch (const nlohmann::json::exception& e) {
    return {400, error_body(ErrorCode::InvalidArgument, e.what())};
  }
}

Json dataset_summary(const std::string& id, const Dataset& dataset) {
  Json links = Json::array();
  for (const auto& f : dataset.spatial) {
    Json link{{"name", f.name},
              {"role", f.name == dataset.dependent_name ? "dependent" : "independent"},
              {"rows", f.series.size()},
              {"has_geometry", !f.waypoints.empty()}};
    if (!f.series.empty()) {
      auto [lo, hi] = std::minmax_element(f.series.begin(), f.series.end(),
                                          [](const SpeedSample& a, const SpeedSample& b) { return a.speed_kmh < b.speed_kmh; });
      link["first"] = f.series.front().time;
      link["last"] = f.series.back().time;
      link["min_kmh"] = lo->speed_kmh;
      link["max_kmh"] = hi->speed_kmh;
    }
    links.push_back(std::move(link));
  }
  Json temporal = Json::array();
  for (const auto& t : dataset.temporal) {
    Json entry{{"name", t.name}, {"definition", t.definition}};
    temporal.push_back(std::move(entry));
  }
  std::size_t aligned = 0;
  try {
    aligned = static_cast<std::size_t>(align(dataset).rows());
  } catch (const Error&) {
    aligned = 0;
  }
  return Json{{"id", id},
              {"dependent", dataset.dependent_name},
              {"sampling_minutes", dataset.sampling_minutes},
              {"links", links},
              {"temporal", temporal},
              {"aligned_rows", aligned}};
}

Json feature_summary(const TemporalFeature& f) {
  std::size_t active = 0;
  for (const auto& v : f.values) active += static_cast<std::size_t>(v.indicator);
  Json out{{"name", f.name},
           {"kind", std::string(to_string(f.definition.kind))},
           {"active_hours", hours_to_json(f.definition.active_hours)},
           {"rows", f.values.size()},
           {"active_rows", active}};
  if (f.definition.threshold) out["threshold"] = *f.definition.threshold;
  return out;
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)), store_(config_.store_dir, config_.id_seed) {}

ApiResponse Service::health() const { return {200, Json{{"status", "ok"}}}; }

ApiResponse Service::create_dataset(const std::string& manifest_text, const std::map<std::string, std::string>& files) {
  return guarded([&]() -> ApiResponse {
    const Manifest manifest = parse_manifest(manifest_text);

    // Validate each file on its own first so the client gets every problem.
    Json errors = Json::array();
    auto report = [&](const std::string& file, const std::string& code, const std::string& message) {
      errors.push_back(Json{{"file", file}, {"code", code}, {"message", message}});
    };
    for (const ManifestLink& link : manifest.links) {
      auto csv = files.find(link.series);
      if (csv == files.end()) {
        report(link.series, link.name == manifest.dependent ? "MissingDependent" : "MissingFile",
               "no uploaded file for link " + link.name);
      } else {
        try {
          parse_series_csv(csv->second, link.name, std::max(manifest.sampling_minutes, 1), link.series);
        } catch (const Error& e) {
          report(link.series, std::string(to_string(e.code())), e.detail());
        }
      }
      if (!link.waypoints) continue;
      auto geo = files.find(*link.waypoints);
      if (geo == files.end()) {
        report(*link.waypoints, "MissingFile", "no uploaded file for link " + link.name);
      } else {
        try {
          parse_waypoints_geojson(geo->second);
        } catch (const Error& e) {
          report(*link.waypoints, std::string(to_string(e.code())), e.detail());
        }
      }
    }
    if (!errors.empty()) return {400, Json{{"errors", errors}}};

    const std::string id = store_.put_dataset(manifest, files);
    return {201, dataset_summary(id, *store_.dataset(id))};
  });
}

ApiResponse Service::get_dataset(const std::string& id) {
  return guarded([&]() -> ApiResponse { return {200, dataset_summary(id, *store_.dataset(id))}; });
}

ApiResponse Service::geometry(const std::string& id) {
  return guarded([&]() -> ApiResponse {
    const auto dataset = store_.dataset(id);
    Json features = Json::array();
    for (const auto& f : dataset->spatial) {
      Json props{{"name", f.name}, {"role", f.name == dataset->dependent_name ? "dependent" : "independent"}};
      Json geometry = nullptr;
      if (f.waypoints.empty()) {
        props["empty_geometry"] = true;
      } else {
        Json coords = Json::array();
        for (const auto& p : f.waypoints) coords.push_back(Json::array({p.lon, p.lat}));
        geometry = Json{{"type", "LineString"}, {"coordinates", coords}};
      }
      features.push_back(Json{{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
    }
    return {200, Json{{"type", "FeatureCollection"}, {"features", features}}};
  });
}

ApiResponse Service::extract_features(const std::string& id, const std::string& body) {
  return guarded([&]() -> ApiResponse {
    if (!store_.has_dataset(id)) throw Error(ErrorCode::UnknownDataset, "dataset " + id);
    const Json j = parse_json(body, "features request");
    const Json list = j.is_object() && j.contains("features") ? j.at("features") : j;
    std::vector<TemporalRequest> requests;
    if (list.is_array()) {
      for (const Json& item : list) requests.push_back(decode<TemporalRequest>(item, "feature request"));
    } else {
      requests.push_back(decode<TemporalRequest>(list, "feature request"));
    }
    Json out = Json::array();
    for (const auto& f : store_.add_features(id, requests)) out.push_back(feature_summary(f));
    return {200, Json{{"dataset", id}, {"features", out}}};
  });
}

ApiResponse Service::create_model(const std::string& body) {
  return guarded([&]() -> ApiResponse {
    const Json j = parse_json(body, "model request");
    const std::string dataset_id = j.at("dataset").get<std::string>();
    const std::string solver_text = j.at("solver").get<std::string>();
    const auto solver = parse_solver(solver_text);
    if (!solver) throw Error(ErrorCode::UnknownSolver, solver_text);
    const auto dataset = store_.dataset(dataset_id);

    const Json params = j.value("params", Json::object());
    ElasticNetParams elastic;
    elastic.lambda = params.value("lambda", elastic.lambda);
    elastic.alpha_mix = params.value("alpha_mix", elastic.alpha_mix);
    elastic.tol = params.value("tol", elastic.tol);
    elastic.max_iter = params.value("max_iter", elastic.max_iter);
    BayesPrior prior;
    prior.tau = params.value("tau", prior.tau);
    prior.a0 = params.value("a0", prior.a0);
    prior.b0 = params.value("b0", prior.b0);

    const FittedModel model = fit(align(*dataset), *solver, elastic, prior);
    const std::string id = store_.put_model(model, {dataset_id});
    Json report = model_report(model);
    report["id"] = id;
    report["dataset"] = dataset_id;
    return {201, report};
  });
}

ApiResponse Service::get_model(const std::string& id) {
  return guarded([&]() -> ApiResponse {
    Json report = model_report(store_.model(id));
    report["id"] = id;
    report["dataset"] = store_.model_meta(id).dataset_id;
    return {200, report};
  });
}

ApiResponse Service::predict(const std::string& model_id, const std::string& body) {
  return guarded([&]() -> ApiResponse {
    const FittedModel model = store_.model(model_id);
    const WhatIfRequest request = what_if_from_json(parse_json(body, "predict request"));
    Json out = what_if_to_json(model, run_what_if(model, request));
    out["model"] = model_id;
    if (request.at) out["time"] = *request.at;
    return {200, out};
  });
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::atomic<bool> bound{false};

  explicit Impl(Service& s) : service(s) {}

  void send(httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  }

  void install() {
    const ServiceConfig& cfg = service.config();
    server.set_payload_max_length(cfg.upload_limit_bytes);

    if (!cfg.cors_origin.empty()) {
      server.set_default_headers({{"Access-Control-Allow-Origin", cfg.cors_origin},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
      server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    server.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send(res, {500, error_body(ErrorCode::Io, message)});
    });

    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) { send(res, service.health()); });

    server.Post("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> files;
      std::string manifest;
      if (req.is_multipart_form_data()) {
        for (const auto& [key, part] : req.files) {
          if (key == "manifest") {
            manifest = part.content;
            continue;
          }
          // Parts are matched to manifest references by file name, falling
          // back to the field name for parts sent without one.
          files[part.filename.empty() ? key : part.filename] = part.content;
        }
      } else {
        try {
          const Json body = Json::parse(req.body);
          manifest = body.at("manifest").dump();
          const Json uploaded = body.value("files", Json::object());
          for (const auto& [name, content] : uploaded.items()) {
            files[name] = content.get<std::string>();
          }
        } catch (const nlohmann::json::exception& e) {
          send(res, {400, error_body(ErrorCode::InvalidArgument, e.what())});
          return;
        }
      }
      if (manifest.empty()) {
        send(res, {400, error_body(ErrorCode::InvalidArgument, "missing 'manifest' part")});
        return;
      }
      send(res, service.create_dataset(manifest, files));
    });

    server.Get(R"(/api/datasets/([0-9a-zA-Z]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.get_dataset(req.matches[1]));
    });
    server.Get(R"(/api/datasets/([0-9a-zA-Z]+)/geometry)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.geometry(req.matches[1]));
    });
    server.Post(R"(/api/datasets/([0-9a-zA-Z]+)/features)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.extract_features(req.matches[1], req.body));
    });
    server.Post("/api/models", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.create_model(req.body));
    });
    server.Get(R"(/api/models/([0-9a-zA-Z]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.get_model(req.matches[1]));
    });
    server.Post(R"(/api/models/([0-9a-zA-Z]+)/predict)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.predict(req.matches[1], req.body));
    });

    if (cfg.ui_dir && std::filesystem::is_directory(*cfg.ui_dir)) {
      server.set_mount_point("/", cfg.ui_dir->string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>linkreg</title><p>API is up under /api. No UI bundle is configured.</p>",
                        "text/html");
      });
    }
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) { impl_->install(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else {
    bound = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  impl_->bound = bound > 0;
  return bound;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace linkreg
