// HTTP routes for the service (cpp-httplib).
#pragma once

#include <optional>
#include <string>

#include "httplib.h"
#include "semsearch/service.hpp"

namespace semsearch {

namespace http_detail {

inline void reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json; charset=utf-8");
}

inline std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

}  // namespace http_detail

// GET /search, /classes, /violations, /health; POST /ingest.
inline void mount_routes(httplib::Server& server, Service& service) {
  using http_detail::reply;
  server.Get("/search", [&service](const httplib::Request& req, httplib::Response& res) {
    auto snap = service.store().current();
    reply(res, handle_search(snap.get(), http_detail::param(req, "q"), http_detail::param(req, "k"), service.config()));
  });
  server.Get("/classes", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_classes(service.store().current().get()));
  });
  server.Get("/violations", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_violations(service.store().current().get()));
  });
  server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_health(service.store().current().get(), service.last_error()));
  });
  server.Post("/ingest", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_ingest(service));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    auto code = res.status == 404 ? "not_found" : res.status == 405 ? "method_not_allowed" : "http_error";
    reply(res, error_response(res.status, code, "request failed with status " + std::to_string(res.status)));
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    reply(res, error_response(500, "internal_error", message));
  });
}

}  // namespace semsearch
