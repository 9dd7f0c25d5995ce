#include "sketchopt/service.hpp"

#include "sketchopt/errors.hpp"
#include "sketchopt/pipeline.hpp"

#include <httplib.h>

#include <ostream>

namespace sketchopt {

namespace {

ApiResponse error_response(int status, const Error& e) {
  return {status, Json{{"error", e.kind()}, {"message", e.what()}}};
}

const char* kFallbackPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>sketchopt</title></head>
<body>
<h1>sketchopt session service</h1>
<p>No explorer build found. The read-only API is available:</p>
<ul>
<li><a href="/api/session">GET /api/session</a>: the session document</li>
<li>GET /api/layout?vars=v1,...,vn: layout polylines and objectives for an assignment</li>
</ul>
</body></html>
)";

}  // namespace

SessionApi::SessionApi(SessionDocument session)
    : session_(std::move(session)), session_json_(session_to_json(session_)), registry_(registry_for(session_.config)) {}

ApiResponse SessionApi::session_document() const { return {200, session_json_}; }

ApiResponse SessionApi::layout(const std::string& vars) const {
  const ModelDocument& m = session_.model;
  Assignment assignment;
  try {
    assignment = parse_vars(vars, m.variables);
  } catch (const ParamError& e) {
    return error_response(400, e);
  } catch (const RangeError& e) {
    return error_response(400, e);
  }
  ParametricGraph moved;
  try {
    moved = transform(m.graph, assignment, m.variables);
  } catch (const DegenerateLayoutError& e) {
    return error_response(422, e);
  }
  const FloorplanLayout layout = layout_of(moved);
  ObjectiveVector ov;
  try {
    ov = evaluate_layout(layout, registry_);
  } catch (const ObjectiveError& e) {
    return error_response(500, e);
  }
  Json body = layout_to_json(layout);
  std::vector<double> genome;
  for (const DesignVariable& v : m.variables) genome.push_back(assignment.at(v.id));
  body["vars"] = genome;
  body["objectives"] = ov.values;
  body["labels"] = ov.labels;
  return {200, std::move(body)};
}

struct Service::Impl {
  SessionApi api;
  std::filesystem::path web_dir;
  httplib::Server server;

  Impl(SessionDocument s, std::filesystem::path dir) : api(std::move(s)), web_dir(std::move(dir)) {}
};

Service::Service(SessionDocument session, std::filesystem::path web_dir)
    : impl_(std::make_unique<Impl>(std::move(session), std::move(web_dir))) {
  auto& srv = impl_->server;
  const SessionApi& api = impl_->api;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  srv.Get("/api/session", [&api, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, api.session_document());
  });
  srv.Get("/api/layout", [&api, reply](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("vars") && !api.session().model.variables.empty()) {
      reply(res, {400, Json{{"error", "ParamError"}, {"message", "missing query parameter 'vars'"}}});
      return;
    }
    reply(res, api.layout(req.get_param_value("vars")));
  });
  std::error_code ec;
  const bool has_assets = std::filesystem::exists(impl_->web_dir / "index.html", ec);
  if (has_assets) {
    srv.set_mount_point("/", impl_->web_dir.string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kFallbackPage, "text/html"); });
  }
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty())
      res.set_content(Json{{"error", "NotFoundError"}, {"message", "no such resource"}}.dump(), "application/json");
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0)
    bound = impl_->server.bind_to_any_port(host);
  else if (impl_->server.bind_to_port(host, port))
    bound = port;
  if (bound < 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

void cmd_serve(const std::filesystem::path& session, const std::filesystem::path& model, const std::string& host,
               int port, std::ostream& diag) {
  SessionDocument s = session_from_json(read_json_file(session));
  if (!model.empty()) {
    const Json given = model_to_json(model_from_json(read_json_file(model)));
    if (given != model_to_json(s.model)) throw SchemaError(model.string() + " does not match the session's model");
  }
  Service service(std::move(s), SKETCHOPT_WEB_DIR);
  const int bound = service.bind(host, port);
  diag << "serving on http://" << host << ":" << bound << "\n" << std::flush;
  service.run();
}

}  // namespace sketchopt
