#pragma once

// Read-only HTTP front end over an Engine.

#include "semviz/service.hpp"

#include <httplib.h>

#include <string>

namespace semviz {

namespace detail {

// Query-string parameters become string members; repeated "relations" join with ','.
inline json params_json(const httplib::Request& req) {
    json out = json::object();
    for (const auto& [key, value] : req.params) {
        if (out.contains(key) && key == "relations") {
            out[key] = out[key].get<std::string>() + "," + value;
        } else {
            out[key] = value;
        }
    }
    return out;
}

inline void write_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(dump(body), "application/json");
}

} // namespace detail

class HttpServer {
public:
    explicit HttpServer(const Engine& engine) : engine_(engine) { routes(); }

    // Binds and serves until stop(); returns false if the port could not be bound.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    // Binds an ephemeral port; serve with listen_after_bind().
    int bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    bool running() const { return server_.is_running(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    void run(httplib::Response& res, std::string_view op, const json& req) {
        int status = 200;
        auto body = engine_.respond(op, req, &status);
        detail::write_json(res, status, body);
    }

    void post(const std::string& path, std::string_view op) {
        server_.Post(path, [this, op](const httplib::Request& req, httplib::Response& res) {
            json body = json::object();
            if (!req.body.empty()) {
                try {
                    body = json::parse(req.body);
                } catch (const json::parse_error& e) {
                    detail::write_json(res, 400, error_body(Error("invalid_json", e.what(), "body")));
                    return;
                }
            }
            run(res, op, body);
        });
    }

    void routes() {
        server_.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) { run(res, "stats", {}); });
        post("/api/agg/tagcloud", "tagcloud");
        post("/api/agg/heatmap", "heatmap");
        post("/api/agg/table", "table");
        post("/api/agg/metrics", "metrics");
        post("/api/agg/histogram", "histogram");
        server_.Get("/api/functional-types", [this](const httplib::Request& req, httplib::Response& res) {
            auto params = detail::params_json(req);
            if (params.contains("members")) params["members"] = params["members"] != "false";
            run(res, "functional-types", params);
        });
        server_.Get(R"(/api/functional-types/(.+)/upstream)", [this](const httplib::Request& req, httplib::Response& res) {
            run(res, "upstream", {{"name", req.matches[1].str()}});
        });
        server_.Get(R"(/api/functional-types/(.+)/opposite-upstream)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        run(res, "opposite-upstream", {{"name", req.matches[1].str()}});
                    });
        server_.Get("/api/pathways", [this](const httplib::Request& req, httplib::Response& res) {
            run(res, "pathways", detail::params_json(req));
        });
        server_.Get(R"(/api/doc/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
            run(res, "doc", {{"id", req.matches[1].str()}});
        });
        server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            const auto code = res.status == 404 ? "not_found" : "http_error";
            detail::write_json(res, res.status,
                               error_body(Error(code, "no route for " + req.method + " " + req.path, "path")));
        });
        server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
            detail::write_json(res, 500, error_body(Error("internal_error", "unhandled exception")));
        });
    }

    const Engine& engine_;
    httplib::Server server_;
};

} // namespace semviz
