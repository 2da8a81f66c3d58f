#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "lexsimp/annotation.hpp"

namespace lexsimp::server {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    /// Served under /ui/ when set.
    std::filesystem::path static_dir;
    annotation::ExportOptions export_options;
};

/// HTTP+JSON front end over an AnnotationStore.
///
///   GET  /tasks?annotator=          task summaries with progress
///   GET  /tasks/{id}                full task, added substitutes, verdicts
///   POST /tasks/{id}/judgments      {substitute, verdict}
///   POST /tasks/{id}/substitutes    {text}
///   GET  /reports/consistency?k=    agreement of LLM consensus and humans
///   GET  /export                    adjudicated instances (?force=1)
///
/// The annotator comes from the X-Annotator-Id header, or an
/// `annotator_id` body field / `annotator` query parameter.
class AnnotationServer {
public:
    AnnotationServer(annotation::AnnotationStore& store, ServerOptions options);
    ~AnnotationServer();

    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lexsimp::server
