#include "lexsimp/providers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <httplib.h>

#include "lexsimp/errors.hpp"

namespace lexsimp::providers {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::string_view kContainsPrefix = "contains:";
constexpr std::string_view kWildcard = "*";

ScriptItem parse_item(const Json& j) {
    if (j.is_string()) return {j.get<std::string>(), std::nullopt};
    if (j.is_object()) {
        if (j.contains("fail")) return {"", j.at("fail").get<std::string>()};
        if (j.contains("text")) return {j.at("text").get<std::string>(), std::nullopt};
    }
    throw ConfigError("script item must be a string, {\"text\": ...} or {\"fail\": ...}");
}

SlotError to_slot_error(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return {err->kind(), err->what()};
    return {"Error", e.what()};
}

} // namespace

Script parse_script(const Json& j) {
    if (!j.is_object()) throw ConfigError("script must be a JSON object");
    Script script;
    for (const auto& [key, value] : j.items()) {
        ScriptEntry entry;
        if (value.is_array()) {
            for (const auto& item : value) entry.queue.push_back(parse_item(item));
        } else {
            entry.queue.push_back(parse_item(value));
            entry.sticky = true;
        }
        script.emplace_back(key, std::move(entry));
    }
    return script;
}

void validate(const ProviderConfig& config) {
    switch (config.kind) {
    case ProviderKind::http_chat:
        if (config.endpoint.empty()) throw ConfigError("http_chat provider '" + config.id + "' needs an endpoint");
        if (config.model.empty()) throw ConfigError("http_chat provider '" + config.id + "' needs a model");
        if (config.retries < 0) throw ConfigError("retries must be >= 0");
        break;
    case ProviderKind::scripted:
        if (config.script.empty()) throw ConfigError("scripted provider '" + config.id + "' needs a script");
        break;
    }
}

ProviderConfig provider_config_from_json(const Json& j, const std::string& base_dir) {
    ProviderConfig c;
    try {
        const auto kind = j.value("kind", std::string("scripted"));
        if (kind == "scripted") c.kind = ProviderKind::scripted;
        else if (kind == "http_chat") c.kind = ProviderKind::http_chat;
        else throw ConfigError("unknown provider kind '" + kind + "'");

        c.id = j.value("id", kind);
        c.endpoint = j.value("endpoint", std::string());
        c.model = j.value("model", std::string());
        c.auth_env = j.value("auth_env", std::string());
        c.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60000));
        c.retries = j.value("retries", 3);
        c.backoff = std::chrono::milliseconds(j.value("backoff_ms", 500));
        c.response_text_path = j.value("response_text_path", c.response_text_path);
        c.request_model_field = j.value("request_model_field", c.request_model_field);
        c.request_messages_field = j.value("request_messages_field", c.request_messages_field);
        if (j.contains("extra_body")) c.extra_body = j.at("extra_body");
        c.requests_per_minute = j.value("requests_per_minute", 0.0);
        c.parallelism = j.value("parallelism", std::size_t{4});

        if (j.contains("script")) {
            c.script = parse_script(j.at("script"));
        } else if (j.contains("script_file")) {
            auto path = std::filesystem::path(j.at("script_file").get<std::string>());
            if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
            std::ifstream in(path);
            if (!in) throw IoError("cannot open script file '" + path.string() + "'");
            c.script = parse_script(Json::parse(in));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed provider config: ") + e.what());
    }
    validate(c);
    return c;
}

ProviderConfig load_provider_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open provider config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("provider config '" + path + "': " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return provider_config_from_json(j, dir.empty() ? "." : dir.string());
}

std::vector<SlotResult> Provider::complete_many(std::span<const ChatRequest> requests) {
    std::vector<SlotResult> out;
    out.reserve(requests.size());
    for (const auto& req : requests) {
        try {
            out.emplace_back(complete(req));
        } catch (const std::exception& e) {
            out.emplace_back(to_slot_error(e));
        }
    }
    return out;
}

// --- scripted ---------------------------------------------------------------

ScriptedProvider::ScriptedProvider(ProviderConfig config) : config_(std::move(config)) {
    validate(config_);
    cursor_.assign(config_.script.size(), 0);
}

ChatResponse ScriptedProvider::complete(const ChatRequest& request) {
    const auto start = Clock::now();
    ++calls_;

    const auto& fp = request.prompt.fingerprint;
    const auto& user = request.prompt.user_text;
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < config_.script.size() && !hit; ++i) {
        if (config_.script[i].first == fp) hit = i;
    }
    for (std::size_t i = 0; i < config_.script.size() && !hit; ++i) {
        const std::string_view key = config_.script[i].first;
        if (key.starts_with(kContainsPrefix) &&
            user.find(key.substr(kContainsPrefix.size())) != std::string::npos) {
            hit = i;
        }
    }
    for (std::size_t i = 0; i < config_.script.size() && !hit; ++i) {
        if (config_.script[i].first == kWildcard) hit = i;
    }
    if (!hit) throw ScriptMissError("no script entry for prompt " + fp);

    ScriptItem item;
    {
        std::lock_guard lock(mutex_);
        const auto& entry = config_.script[*hit].second;
        auto& cursor = cursor_[*hit];
        if (entry.sticky) {
            item = entry.queue.front();
        } else {
            if (cursor >= entry.queue.size()) {
                throw ScriptMissError("script entry '" + config_.script[*hit].first + "' exhausted after " +
                                      std::to_string(entry.queue.size()) + " replies");
            }
            item = entry.queue[cursor++];
        }
    }
    if (item.fail) throw TransportError(*item.fail);
    return {item.text, config_.id,
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)};
}

// --- rate limiting ------------------------------------------------------------

RateLimiter::RateLimiter(double requests_per_minute)
    : rate_per_sec_(requests_per_minute / 60.0),
      capacity_(std::max(1.0, requests_per_minute / 60.0)),
      tokens_(capacity_),
      last_(Clock::now()) {}

void RateLimiter::acquire() {
    if (rate_per_sec_ <= 0.0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = Clock::now();
        tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_per_sec_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_per_sec_);
        lock.unlock();
        std::this_thread::sleep_for(wait);
        lock.lock();
    }
}

// --- http ---------------------------------------------------------------------

HttpChatProvider::HttpChatProvider(ProviderConfig config)
    : config_(std::move(config)), limiter_(config_.requests_per_minute) {
    validate(config_);
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + config_.endpoint);
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

Json HttpChatProvider::request_body(const ChatRequest& request) const {
    Json body = Json::object();
    body[config_.request_model_field] = config_.model;
    Json messages = Json::array();
    if (!request.prompt.system_text.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.prompt.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.prompt.user_text}});
    body[config_.request_messages_field] = std::move(messages);
    body["temperature"] = request.decoding.temperature;
    body["max_tokens"] = request.decoding.max_tokens;
    if (request.decoding.seed) body["seed"] = *request.decoding.seed;
    for (const auto& [k, v] : config_.extra_body.items()) body[k] = v;
    return body;
}

ChatResponse HttpChatProvider::complete(const ChatRequest& request) {
    if (request.decoding.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");

    httplib::Headers headers;
    if (!config_.auth_env.empty()) {
        const char* token = std::getenv(config_.auth_env.c_str());
        if (token == nullptr || *token == '\0') {
            throw ConfigError("environment variable " + config_.auth_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    const auto body = request_body(request).dump();

    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1 << std::min(attempt - 1, 16)));
        limiter_.acquire();
        ++calls_;
        const auto start = Clock::now();
        auto res = client.Post(path_, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw TransportError(config_.id + ": HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        try {
            const auto payload = Json::parse(res->body);
            const auto& node = payload.at(Json::json_pointer(config_.response_text_path));
            return {node.get<std::string>(), config_.id,
                    std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)};
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(config_.id + ": unexpected response payload: " + e.what());
        }
    }
    throw TransportError(config_.id + ": giving up after " + std::to_string(config_.retries + 1) +
                         " attempts (" + last_error + ")");
}

std::vector<SlotResult> HttpChatProvider::complete_many(std::span<const ChatRequest> requests) {
    std::vector<SlotResult> out(requests.size(), SlotError{"Error", "not run"});
    const std::size_t width = std::max<std::size_t>(1, config_.parallelism);
    for (std::size_t base = 0; base < requests.size(); base += width) {
        const std::size_t end = std::min(requests.size(), base + width);
        std::vector<std::future<ChatResponse>> pending;
        for (std::size_t i = base; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, [this, &requests, i] { return complete(requests[i]); }));
        }
        for (std::size_t i = base; i < end; ++i) {
            try {
                out[i] = pending[i - base].get();
            } catch (const std::exception& e) {
                out[i] = to_slot_error(e);
            }
        }
    }
    return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    switch (config.kind) {
    case ProviderKind::scripted: return std::make_unique<ScriptedProvider>(config);
    case ProviderKind::http_chat: return std::make_unique<HttpChatProvider>(config);
    }
    throw ConfigError("unknown provider kind");
}

} // namespace lexsimp::providers
