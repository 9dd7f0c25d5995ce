#pragma once

#include "sketchopt/documents.hpp"
#include "sketchopt/objective.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace sketchopt {

struct ApiResponse {
  int status = 200;
  Json body;
};

/// Read-only view over one loaded session. Every method is const and safe to
/// call from concurrent request handlers.
class SessionApi {
public:
  explicit SessionApi(SessionDocument session);

  const SessionDocument& session() const noexcept { return session_; }
  /// GET /api/session
  ApiResponse session_document() const;
  /// GET /api/layout?vars=v1,...,vn. 400 for malformed or out-of-range
  /// values, 422 when the assignment collapses the layout.
  ApiResponse layout(const std::string& vars) const;

private:
  SessionDocument session_;
  Json session_json_;
  ObjectiveRegistry registry_;
};

/// HTTP front end: the two API routes plus static explorer assets at /.
class Service {
public:
  Service(SessionDocument session, std::filesystem::path web_dir);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Bind and return the port (0 picks a free one). Throws IoError when busy.
  int bind(const std::string& host, int port);
  /// Serve until stop(); call after bind().
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Load session.json (and check model.json against the session's embedded
/// model when given), then serve on host:port until interrupted.
void cmd_serve(const std::filesystem::path& session, const std::filesystem::path& model, const std::string& host,
               int port, std::ostream& diag);

}  // namespace sketchopt
