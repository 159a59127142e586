#pragma once
// Language-model access: prompt templates, backends, retries, response cache.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace pdrr::llm {

inline constexpr int kIntermediateMaxTokens = 256;
inline constexpr int kFinalMaxTokens = 1024;
inline constexpr double kDefaultTemperature = 0.1;

struct FewShotExample {
    std::string input;
    std::string output;
};

/// A prompt with `{{slot}}` placeholders. `instruction` comes first, then the
/// few-shot examples in order, then `query` (the per-call block).
struct PromptTemplate {
    std::string name;
    std::string instruction;
    std::vector<FewShotExample> few_shot;
    std::string query;
    std::vector<std::string> slots;

    /// Throws InvalidTemplate if a referenced slot is undeclared or the
    /// few-shot count differs from `expected_shots`.
    void validate(std::optional<std::size_t> expected_shots = std::nullopt) const;
};

using Bindings = std::map<std::string, std::string>;

struct RenderedPrompt {
    std::string text;
    std::size_t query_offset = 0;  // where the per-call query block starts
};

/// Substitute every slot; throws MissingSlot for an unbound one.
RenderedPrompt render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

struct CompletionRequest {
    std::string prompt;
    int max_tokens = kIntermediateMaxTokens;
    double temperature = kDefaultTemperature;
    // Routing hints for scripted backends; not part of the cache key.
    std::string template_name;
    std::size_t query_offset = 0;
    int attempt = 0;  // >0 for deliberate re-asks; part of the cache key
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct BackendReply {
    std::string text;
    TokenUsage usage;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    /// Throws BackendError (retriable or not) or ScriptMiss.
    virtual BackendReply generate(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
    virtual std::string model() const = 0;
};

/// Canned responses keyed by prompt matchers; the first matching entry wins
/// and an unmatched request throws ScriptMiss. Substring matchers look at the
/// query block only (the text after the few-shot examples) unless the entry
/// asks for the whole prompt.
class ScriptedBackend final : public LlmBackend {
public:
    struct Entry {
        std::vector<std::string> contains;  // all substrings must occur
        bool whole_prompt = false;
        std::optional<std::string> digest;  // exact SHA-256 of the prompt
        std::optional<std::string> template_name;
        std::optional<int> attempt;
        std::string response;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    /// JSONL lines: {"matcher": "text" | ["a","b"] | "sha256:<hex>",
    ///               "response": "...", "template": "...", "attempt": n,
    ///               "scope": "query" | "prompt"}
    static ScriptedBackend from_jsonl(std::istream& in);
    static ScriptedBackend from_file(const std::string& path);

    void add(Entry e) { entries_.push_back(std::move(e)); }
    std::size_t size() const noexcept { return entries_.size(); }

    BackendReply generate(const CompletionRequest& request) override;
    std::string id() const override { return "scripted"; }
    std::string model() const override { return "scripted"; }

private:
    std::vector<Entry> entries_;
};

struct HttpChatConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-2024-11-20";
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completion client. HTTP 5xx and transport errors
/// are reported retriable; 4xx are not.
class HttpChatBackend final : public LlmBackend {
public:
    explicit HttpChatBackend(HttpChatConfig config);

    BackendReply generate(const CompletionRequest& request) override;
    std::string id() const override { return "http:" + config_.endpoint; }
    std::string model() const override { return config_.model; }

private:
    HttpChatConfig config_;
    std::string scheme_host_port_;
    std::string path_;
};

struct CachedResponse {
    std::string text;
    std::string timestamp;
    TokenUsage usage;
};

/// Append-only JSONL response cache keyed by hex digest. Corrupt lines are
/// skipped on load (counted in skipped_lines()).
class ResponseCache {
public:
    ResponseCache() = default;  // in-memory only
    explicit ResponseCache(std::string path);

    std::optional<CachedResponse> get(const std::string& key) const;
    void put(const std::string& key, const CachedResponse& value);

    std::size_t size() const;
    std::size_t skipped_lines() const noexcept { return skipped_; }
    const std::string& path() const noexcept { return path_; }
    void clear();

private:
    std::string path_;
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, CachedResponse> entries_;
    std::size_t skipped_ = 0;
};

std::string sha256_hex(std::string_view data);

/// Cache key over (backend id, model, prompt, max_tokens, temperature, attempt).
std::string fingerprint(const std::string& backend_id, const std::string& model,
                        const CompletionRequest& request);

struct Completion {
    std::string text;
    std::string call_id;  // short prefix of the fingerprint
    bool cached = false;
    TokenUsage usage;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{1000};
};

/// Cache-first completion with bounded retries. Safe for concurrent callers.
class LlmClient {
public:
    LlmClient(LlmBackend& backend, ResponseCache* cache, RetryPolicy retry = {});

    Completion complete(const CompletionRequest& request);

    std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
    std::size_t cache_hits() const noexcept { return cache_hits_.load(); }
    long tokens_used() const noexcept { return tokens_.load(); }
    LlmBackend& backend() noexcept { return backend_; }

private:
    LlmBackend& backend_;
    ResponseCache* cache_;
    RetryPolicy retry_;
    std::atomic<std::size_t> backend_calls_{0};
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<long> tokens_{0};
};

/// One-shot form of LlmClient::complete.
Completion complete(const CompletionRequest& request, LlmBackend& backend, ResponseCache* cache);

}  // namespace pdrr::llm
