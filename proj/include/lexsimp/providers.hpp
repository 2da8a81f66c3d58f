#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lexsimp/promptkit.hpp"

namespace lexsimp::providers {

using promptkit::RenderedPrompt;

struct Decoding {
    double temperature = 0.7;
    int max_tokens = 512;
    std::optional<std::int64_t> seed;
};

/// Documented defaults: diverse sampling for ensemble voters, greedy for
/// yes/no judgements.
inline Decoding ensemble_decoding() { return {0.7, 512, std::nullopt}; }
inline Decoding judgement_decoding() { return {0.0, 512, std::nullopt}; }

struct ChatRequest {
    RenderedPrompt prompt;
    Decoding decoding;
};

struct ChatResponse {
    std::string text;
    std::string provider_id;
    std::chrono::milliseconds latency{0};
};

enum class ProviderKind { scripted, http_chat };

/// One canned reply. `fail` set means the call raises TransportError.
struct ScriptItem {
    std::string text;
    std::optional<std::string> fail;
};

/// A script entry either pops its queue per call or always answers the
/// same reply (`sticky`).
struct ScriptEntry {
    std::vector<ScriptItem> queue;
    bool sticky = false;
};

/// Keys are looked up in order: exact prompt fingerprint, then
/// `contains:<text>` keys in file order (matched against the user text),
/// then the wildcard `*`.
using Script = std::vector<std::pair<std::string, ScriptEntry>>;

Script parse_script(const nlohmann::ordered_json& j);

struct ProviderConfig {
    ProviderKind kind = ProviderKind::scripted;
    std::string id = "provider";

    // http_chat
    std::string endpoint;
    std::string model;
    std::string auth_env;
    std::chrono::milliseconds timeout{60000};
    int retries = 3;
    std::chrono::milliseconds backoff{500};
    /// JSON pointer into the response body that holds the reply text.
    std::string response_text_path = "/choices/0/message/content";
    std::string request_model_field = "model";
    std::string request_messages_field = "messages";
    nlohmann::ordered_json extra_body = nlohmann::ordered_json::object();

    // scripted
    Script script;

    /// Token-bucket limit in requests per minute; 0 means unlimited.
    double requests_per_minute = 0.0;
    std::size_t parallelism = 4;
};

/// Throws ConfigError when required fields for the kind are missing.
void validate(const ProviderConfig& config);

/// Reads a provider config file. A scripted config may inline `script` or
/// reference `script_file` (resolved relative to the config file).
ProviderConfig load_provider_config(const std::string& path);
ProviderConfig provider_config_from_json(const nlohmann::ordered_json& j, const std::string& base_dir = ".");

struct SlotError {
    std::string kind;
    std::string message;
};

using SlotResult = std::variant<ChatResponse, SlotError>;

class Provider {
public:
    virtual ~Provider() = default;

    virtual ChatResponse complete(const ChatRequest& request) = 0;

    /// Responses are positionally aligned with `requests`; a failing slot
    /// holds a SlotError instead of aborting the batch.
    virtual std::vector<SlotResult> complete_many(std::span<const ChatRequest> requests);

    virtual const std::string& id() const = 0;
    std::size_t calls() const { return calls_.load(); }

protected:
    std::atomic<std::size_t> calls_{0};
};

class ScriptedProvider final : public Provider {
public:
    explicit ScriptedProvider(ProviderConfig config);

    /// complete_many stays sequential in request order, so queue pops are
    /// reproducible.
    ChatResponse complete(const ChatRequest& request) override;
    const std::string& id() const override { return config_.id; }

private:
    ProviderConfig config_;
    std::mutex mutex_;
    std::vector<std::size_t> cursor_;
};

class RateLimiter {
public:
    explicit RateLimiter(double requests_per_minute);
    void acquire();

private:
    double rate_per_sec_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

class HttpChatProvider final : public Provider {
public:
    explicit HttpChatProvider(ProviderConfig config);

    ChatResponse complete(const ChatRequest& request) override;
    /// Runs up to `parallelism` requests at a time.
    std::vector<SlotResult> complete_many(std::span<const ChatRequest> requests) override;
    const std::string& id() const override { return config_.id; }

    /// Body sent for `request`; exposed for tests.
    nlohmann::ordered_json request_body(const ChatRequest& request) const;

private:
    ProviderConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    RateLimiter limiter_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

} // namespace lexsimp::providers
