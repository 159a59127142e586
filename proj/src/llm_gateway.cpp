#include "pdrr/llm_gateway.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <set>
#include <thread>

#include <httplib.h>
#include <openssl/evp.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::llm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Templates

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

std::vector<std::string> referenced_slots(std::string_view body) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = body.find(kOpen, pos)) != std::string_view::npos) {
        auto end = body.find(kClose, pos + kOpen.size());
        if (end == std::string_view::npos) break;
        out.emplace_back(body.substr(pos + kOpen.size(), end - pos - kOpen.size()));
        pos = end + kClose.size();
    }
    return out;
}

std::string substitute(std::string_view body, const Bindings& bindings, const std::string& tmpl) {
    std::string out;
    out.reserve(body.size());
    std::size_t pos = 0;
    while (true) {
        auto open = body.find(kOpen, pos);
        if (open == std::string_view::npos) break;
        auto close = body.find(kClose, open + kOpen.size());
        if (close == std::string_view::npos) break;
        std::string slot(body.substr(open + kOpen.size(), close - open - kOpen.size()));
        auto it = bindings.find(slot);
        if (it == bindings.end()) {
            throw MissingSlot("template '" + tmpl + "' slot '" + slot + "' is unbound");
        }
        out.append(body.substr(pos, open - pos));
        out.append(it->second);
        pos = close + kClose.size();
    }
    out.append(body.substr(pos));
    return out;
}

}  // namespace

void PromptTemplate::validate(std::optional<std::size_t> expected_shots) const {
    std::set<std::string> declared(slots.begin(), slots.end());
    for (const auto* body : {&instruction, &query}) {
        for (const auto& s : referenced_slots(*body)) {
            if (!declared.count(s)) {
                throw InvalidTemplate("template '" + name + "' references undeclared slot '" + s + "'");
            }
        }
    }
    if (expected_shots && few_shot.size() != *expected_shots) {
        throw InvalidTemplate("template '" + name + "' has " + std::to_string(few_shot.size()) +
                              " few-shot examples, expected " + std::to_string(*expected_shots));
    }
}

RenderedPrompt render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    std::string out = substitute(tmpl.instruction, bindings, tmpl.name);
    if (!tmpl.few_shot.empty()) {
        out += "\n\nExamples:";
        for (const auto& ex : tmpl.few_shot) {
            out += "\n\n";
            out += ex.input;
            out += "\n";
            out += ex.output;
        }
    }
    out += "\n\n";
    RenderedPrompt r;
    r.query_offset = out.size();
    out += substitute(tmpl.query, bindings, tmpl.name);
    r.text = std::move(out);
    return r;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
    return render_prompt(tmpl, bindings).text;
}

// ---------------------------------------------------------------------------
// Digests

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

std::string fingerprint(const std::string& backend_id, const std::string& model,
                        const CompletionRequest& request) {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.6f", request.temperature);
    json key = json::array({backend_id, model, request.prompt, request.max_tokens, temp,
                            request.attempt});
    return sha256_hex(key.dump());
}

// ---------------------------------------------------------------------------
// ScriptedBackend

namespace {

long rough_tokens(std::string_view s) {
    return static_cast<long>(text::tokenize(s).size());
}

}  // namespace

ScriptedBackend ScriptedBackend::from_jsonl(std::istream& in) {
    ScriptedBackend backend;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("matcher") || !j.contains("response") ||
            !j["response"].is_string()) {
            throw FormatError("script line " + std::to_string(lineno) +
                              ": expected {matcher, response}");
        }
        Entry e;
        const auto& m = j["matcher"];
        if (m.is_string()) {
            auto s = m.get<std::string>();
            if (s.rfind("sha256:", 0) == 0) {
                e.digest = s.substr(7);
            } else {
                e.contains.push_back(std::move(s));
            }
        } else if (m.is_array() && !m.empty()) {
            for (const auto& part : m) {
                if (!part.is_string()) throw FormatError("script line " + std::to_string(lineno) +
                                                         ": matcher array must hold strings");
                e.contains.push_back(part.get<std::string>());
            }
        } else {
            throw FormatError("script line " + std::to_string(lineno) + ": bad matcher");
        }
        if (j.contains("template")) e.template_name = j["template"].get<std::string>();
        if (j.contains("attempt")) e.attempt = j["attempt"].get<int>();
        if (j.contains("scope")) {
            auto scope = j["scope"].get<std::string>();
            if (scope != "query" && scope != "prompt") {
                throw FormatError("script line " + std::to_string(lineno) + ": scope must be query|prompt");
            }
            e.whole_prompt = scope == "prompt";
        }
        e.response = j["response"].get<std::string>();
        backend.add(std::move(e));
    }
    return backend;
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open script file " + path);
    return from_jsonl(in);
}

BackendReply ScriptedBackend::generate(const CompletionRequest& request) {
    std::optional<std::string> digest;
    for (const auto& e : entries_) {
        if (e.template_name && *e.template_name != request.template_name) continue;
        if (e.attempt && *e.attempt != request.attempt) continue;
        if (e.digest) {
            if (!digest) digest = sha256_hex(request.prompt);
            if (*digest != *e.digest) continue;
        }
        std::string_view haystack = request.prompt;
        if (!e.whole_prompt && request.query_offset <= haystack.size()) {
            haystack.remove_prefix(request.query_offset);
        }
        bool all = true;
        for (const auto& needle : e.contains) {
            if (haystack.find(needle) == std::string_view::npos) {
                all = false;
                break;
            }
        }
        if (!all) continue;
        return {e.response, {rough_tokens(request.prompt), rough_tokens(e.response)}};
    }
    auto tail = request.prompt.size() > 300 ? request.prompt.substr(request.prompt.size() - 300)
                                            : request.prompt;
    throw ScriptMiss("no scripted response for template '" + request.template_name +
                     "' (attempt " + std::to_string(request.attempt) + "); prompt ends with: " + tail);
}

// ---------------------------------------------------------------------------
// HttpChatBackend

HttpChatBackend::HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {
    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme");
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = config_.endpoint;
        path_ = "/";
    } else {
        scheme_host_port_ = config_.endpoint.substr(0, path_start);
        path_ = config_.endpoint.substr(path_start);
    }
}

BackendReply HttpChatBackend::generate(const CompletionRequest& request) {
    json body = {
        {"model", config_.model},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(config_.timeout);
    cli.set_read_timeout(config_.timeout);
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw BackendError("transport error: " + httplib::to_string(res.error()), true);
    if (res->status >= 500) throw BackendError("HTTP " + std::to_string(res->status), true);
    if (res->status >= 400) {
        throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), false);
    }
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw BackendError("malformed chat-completion response", false);
    }
    const auto& msg = j["choices"][0]["message"];
    if (!msg.contains("content") || !msg["content"].is_string()) {
        throw BackendError("chat-completion response has no content", false);
    }
    BackendReply reply;
    reply.text = msg["content"].get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
        reply.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
        reply.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
    }
    return reply;
}

// ---------------------------------------------------------------------------
// ResponseCache

namespace {

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j["key"].is_string() ||
            !j.contains("response") || !j["response"].is_string()) {
            ++skipped_;
            spdlog::warn("cache {}: skipping corrupt line {}", path_, lineno);
            continue;
        }
        CachedResponse r;
        r.text = j["response"].get<std::string>();
        r.timestamp = j.value("timestamp", "");
        if (j.contains("usage") && j["usage"].is_object()) {
            r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
            r.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
        }
        entries_.insert_or_assign(j["key"].get<std::string>(), std::move(r));
    }
}

std::optional<CachedResponse> ResponseCache::get(const std::string& key) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::put(const std::string& key, const CachedResponse& value) {
    std::unique_lock lock(mu_);
    if (entries_.count(key)) return;
    entries_.emplace(key, value);
    if (path_.empty()) return;
    json line = {
        {"key", key},
        {"response", value.text},
        {"timestamp", value.timestamp},
        {"usage", {{"prompt_tokens", value.usage.prompt_tokens},
                   {"completion_tokens", value.usage.completion_tokens}}},
    };
    std::string serialized;
    try {
        serialized = line.dump();
    } catch (const json::type_error&) {
        // Not valid UTF-8; keep it in memory only so replays stay byte-exact.
        return;
    }
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << serialized << '\n';
    out.flush();
}

std::size_t ResponseCache::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

void ResponseCache::clear() {
    std::unique_lock lock(mu_);
    entries_.clear();
    skipped_ = 0;
    if (!path_.empty()) std::ofstream(path_, std::ios::binary | std::ios::trunc);
}

// ---------------------------------------------------------------------------
// LlmClient

LlmClient::LlmClient(LlmBackend& backend, ResponseCache* cache, RetryPolicy retry)
    : backend_(backend), cache_(cache), retry_(retry) {}

Completion LlmClient::complete(const CompletionRequest& request) {
    if (request.max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
    if (request.temperature < 0.0 || request.temperature > 1.0) {
        throw std::invalid_argument("temperature must lie in [0, 1]");
    }
    auto key = fingerprint(backend_.id(), backend_.model(), request);
    Completion out;
    out.call_id = key.substr(0, 12);
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            cache_hits_.fetch_add(1);
            out.text = std::move(hit->text);
            out.usage = hit->usage;
            out.cached = true;
            return out;
        }
    }

    auto backoff = retry_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            backend_calls_.fetch_add(1);
            auto reply = backend_.generate(request);
            tokens_.fetch_add(reply.usage.prompt_tokens + reply.usage.completion_tokens);
            if (cache_) cache_->put(key, {reply.text, utc_now(), reply.usage});
            out.text = std::move(reply.text);
            out.usage = reply.usage;
            return out;
        } catch (const BackendError& e) {
            if (!e.retriable() || attempt >= retry_.max_retries) throw;
            spdlog::debug("backend error ({}), retry {}", e.what(), attempt + 1);
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

Completion complete(const CompletionRequest& request, LlmBackend& backend, ResponseCache* cache) {
    LlmClient client(backend, cache);
    return client.complete(request);
}

}  // namespace pdrr::llm
