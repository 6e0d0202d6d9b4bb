#include "partable/http.hpp"

#include <httplib.h>

namespace partable {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto send = [](httplib::Response& res, const Response& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto body_of = [](const httplib::Request& req, httplib::Response& res, json& out) {
      out = json::parse(req.body, nullptr, false);
      if (out.is_discarded()) {
        res.status = 400;
        res.set_content(error_body(400, "request body is not JSON").dump(), "application/json");
        return false;
      }
      return true;
    };

    server.Post("/session", [this, send, body_of](const httplib::Request& req, httplib::Response& res) {
      json body;
      if (body_of(req, res, body)) send(res, service.create(body));
    });
    server.Get(R"(/session/([0-9a-zA-Z]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.state(req.matches[1]));
    });
    server.Post(R"(/session/([0-9a-zA-Z]+)/act)",
                [this, send, body_of](const httplib::Request& req, httplib::Response& res) {
                  json body;
                  if (body_of(req, res, body)) send(res, service.act(req.matches[1], body));
                });
    server.Delete(R"(/session/([0-9a-zA-Z]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.remove(req.matches[1]));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) res.set_content(error_body(res.status, "not found").dump(), "application/json");
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::run() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }

}  // namespace partable
