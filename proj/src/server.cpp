#include "lexsimp/server.hpp"

#include <thread>

#include <httplib.h>

#include "lexsimp/errors.hpp"

namespace lexsimp::server {

using Json = nlohmann::ordered_json;

namespace {

int status_for(const Error& e) {
    const auto& kind = e.kind();
    if (kind == "NotFound") return 404;
    if (kind == "IncompleteError") return 409;
    if (kind == "ValidationError" || kind == "ParseError" || kind == "InputError") return 400;
    return 500;
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
    send_json(res, status, Json{{"error", {{"kind", kind}, {"message", message}}}});
}

std::optional<std::string> annotator_of(const httplib::Request& req, const Json* body = nullptr) {
    if (req.has_header("X-Annotator-Id")) return req.get_header_value("X-Annotator-Id");
    if (body != nullptr && body->contains("annotator_id")) return body->at("annotator_id").get<std::string>();
    if (req.has_param("annotator")) return req.get_param_value("annotator");
    return std::nullopt;
}

Json parse_body(const httplib::Request& req) {
    Json body;
    try {
        body = Json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("request body: ") + e.what());
    }
    if (!body.is_object()) throw ParseError("request body must be a JSON object");
    return body;
}

std::string required_string(const Json& body, const char* field, const std::string& subject) {
    if (!body.contains(field) || !body.at(field).is_string()) {
        throw ValidationError(subject, field, "required string field");
    }
    return body.at(field).get<std::string>();
}

} // namespace

struct AnnotationServer::Impl {
    annotation::AnnotationStore& store;
    ServerOptions options;
    httplib::Server http;
    std::thread worker;
    int bound_port = -1;

    Impl(annotation::AnnotationStore& s, ServerOptions o) : store(s), options(std::move(o)) { install(); }

    template <class Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_error(res, status_for(e), e.kind(), e.what());
            } catch (const nlohmann::json::exception& e) {
                send_error(res, 400, "ParseError", e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "InternalError", e.what());
            }
        };
    }

    void install() {
        http.Get("/tasks", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, Json{{"tasks", store.list_tasks(annotator_of(req))}});
        }));
        http.Get(R"(/tasks/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, Json(store.get_task(req.matches[1], annotator_of(req))));
        }));
        http.Post(R"(/tasks/([^/]+)/judgments)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string task_id = req.matches[1];
            const auto body = parse_body(req);
            const auto who = annotator_of(req, &body);
            if (!who) throw ValidationError(task_id, "annotator_id", "missing X-Annotator-Id header");
            const auto substitute = required_string(body, "substitute", task_id);
            annotation::Verdict verdict;
            try {
                verdict = annotation::parse_verdict(required_string(body, "verdict", task_id));
            } catch (const ParseError& e) {
                throw ValidationError(task_id, "verdict", e.what());
            }
            send_json(res, 201, Json(store.record_judgment(task_id, substitute, *who, verdict)));
        }));
        http.Post(R"(/tasks/([^/]+)/substitutes)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string task_id = req.matches[1];
            const auto body = parse_body(req);
            const auto who = annotator_of(req, &body);
            if (!who) throw ValidationError(task_id, "annotator_id", "missing X-Annotator-Id header");
            send_json(res, 201, Json(store.add_substitute(task_id, required_string(body, "text", task_id), *who)));
        }));
        http.Get("/reports/consistency", guarded([this](const httplib::Request& req, httplib::Response& res) {
            int k = 3;
            if (req.has_param("k")) {
                try {
                    k = std::stoi(req.get_param_value("k"));
                } catch (const std::exception&) {
                    throw InputError("k must be an integer");
                }
            }
            send_json(res, 200, Json(store.consistency_report(k, options.export_options)));
        }));
        http.Get("/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto opts = options.export_options;
            if (req.has_param("force")) opts.force = req.get_param_value("force") != "0";
            send_json(res, 200, Json{{"instances", store.export_dataset(opts)}});
        }));

        if (!options.static_dir.empty()) {
            if (!http.set_mount_point("/ui", options.static_dir.string())) {
                throw ConfigError("static directory not found: " + options.static_dir.string());
            }
            http.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
        }
    }

    void bind() {
        if (bound_port >= 0) return;
        bound_port = options.port == 0 ? http.bind_to_any_port(options.host)
                                       : (http.bind_to_port(options.host, options.port) ? options.port : -1);
        if (bound_port < 0) {
            throw IoError("cannot bind " + options.host + ":" + std::to_string(options.port));
        }
    }
};

AnnotationServer::AnnotationServer(annotation::AnnotationStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
    impl_->bind();
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return impl_->bound_port;
}

void AnnotationServer::run() {
    impl_->bind();
    impl_->http.listen_after_bind();
}

void AnnotationServer::stop() {
    if (!impl_) return;
    impl_->http.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int AnnotationServer::port() const { return impl_->bound_port; }

} // namespace lexsimp::server
