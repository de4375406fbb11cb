#include "vizagent/service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace vizagent {

using nlohmann::json;

struct HttpService::Impl {
  Impl(Agent& a, ServerOptions o) : agent(a), options(std::move(o)) {}

  Agent& agent;
  ServerOptions options;
  httplib::Server server;
  int port = 0;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  json err{{"code", std::string(to_string(e.code()))}, {"message", e.detail()}};
  if (!e.stage().empty()) err["stage"] = e.stage();
  send_json(res, http_status_for(e.code()), {{"error", err}});
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::SchemaError, std::string("bad request body: ") + e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

HttpService::HttpService(Agent& agent, ServerOptions options)
    : impl_(std::make_unique<Impl>(agent, std::move(options))) {
  auto& srv = impl_->server;
  Agent& a = impl_->agent;

  srv.Get("/api/health", guarded([](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); }));

  srv.Get("/api/studies", guarded([&a](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& s : a.studies()) list.push_back(study_summary_json(*s));
    send_json(res, 200, {{"studies", list}});
  }));

  srv.Post("/api/studies", guarded([&a](const httplib::Request& req, httplib::Response& res) {
    Study s = load_study(req.body);
    const std::string id = s.id;
    a.add_study(std::move(s));
    send_json(res, 201, study_summary_json(*a.study(id)));
  }));

  srv.Post("/api/generate", guarded([&a](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    GenerateOptions opts;
    if (!body.contains("study_id") || !body["study_id"].is_string()) throw Error(ErrorCode::SchemaError, "study_id is required");
    if (!body.contains("prompt") || !body["prompt"].is_string()) throw Error(ErrorCode::SchemaError, "prompt is required");
    if (auto it = body.find("backend"); it != body.end() && !it->is_null()) {
      const auto mode = backend_mode_from_string(it->get<std::string>());
      if (!mode) throw Error(ErrorCode::ConfigError, "backend must be http, replay or mock");
      opts.backend = *mode;
    }
    opts.repair = body.value("repair", false);
    opts.llm_fallback = body.value("llm_fallback", false);
    const auto result = a.generate(body["study_id"].get<std::string>(), body["prompt"].get<std::string>(), opts);
    auto j = result_to_json(result);
    j["svg_url"] = result.svg ? json("/api/results/" + result.id + ".svg") : json(nullptr);
    send_json(res, 200, j);
  }));

  srv.Get(R"(/api/results/([0-9a-f]+)\.svg)", guarded([&a](const httplib::Request& req, httplib::Response& res) {
    res.set_content(a.result_svg(req.matches[1]), "image/svg+xml");
  }));

  srv.Get(R"(/api/results/([0-9a-f]+))", guarded([&a](const httplib::Request& req, httplib::Response& res) {
    res.set_content(a.result_json(req.matches[1]), "application/json");
  }));

  srv.Post("/api/eval/aggregate", guarded([](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, evaluate_scores_json(req.body));
  }));

  if (!impl_->options.static_dir.empty()) srv.set_mount_point("/", impl_->options.static_dir);
}

HttpService::~HttpService() { stop(); }

int HttpService::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (impl_->port < 0) throw Error(ErrorCode::IoError, "cannot bind " + o.host + ":" + std::to_string(o.port));
  return impl_->port;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpService::wait_until_ready() const {
  impl_->server.wait_until_ready();
  return impl_->server.is_running();
}

}  // namespace vizagent
