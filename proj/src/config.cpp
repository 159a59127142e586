#include "pdrr/config.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::config {

const std::vector<KeyInfo>& keys() {
    static const std::vector<KeyInfo> k = {
        {"llm", "http", "language-model backend: http or scripted"},
        {"script", "", "scripted responses file (JSONL) for llm=scripted"},
        {"llm_endpoint", "https://api.openai.com/v1/chat/completions", "chat-completion endpoint"},
        {"llm_model", "gpt-4o-2024-11-20", "model name sent to the endpoint"},
        {"api_key_env", "OPENAI_API_KEY", "environment variable holding the API key"},
        {"kg", "", "graph file (.tsv or .nt) or SPARQL endpoint URL"},
        {"kg_timeout_ms", "10000", "SPARQL request timeout in milliseconds"},
        {"result_cap", "2000", "maximum rows per graph query"},
        {"method", "pdrr", "pdrr, pdr, io or cot"},
        {"type_source", "predicted", "predicted or gold question types"},
        {"width", "2", "beam width for chain questions"},
        {"relation_keep", "5", "relations kept after relation pruning"},
        {"candidate_cap", "60", "relations shown to the model per prune"},
        {"rendering", "triples", "evidence rendering: triples or sentences"},
        {"temperature", "0.1", "sampling temperature"},
        {"max_tokens", "256", "token budget of intermediate calls"},
        {"final_max_tokens", "1024", "token budget of answering calls"},
        {"timeout", "120", "per-question time budget in seconds (0 disables)"},
        {"templates", "", "directory of prompt template overrides"},
        {"cache", "", "response cache file (JSONL); empty keeps it in memory"},
        {"workers", "1", "concurrent records during eval"},
        {"trace_dir", "pdrr-traces", "where ask writes its trace"},
        {"dataset_format", "auto", "auto, cwq, webqsp or generic"},
        {"log_level", "warn", "trace, debug, info, warn, error or off"},
    };
    return k;
}

std::string env_name(std::string_view key) {
    std::string out = "PDRR_";
    for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string flag_name(std::string_view key) {
    std::string out(key);
    for (auto& c : out) {
        if (c == '_') c = '-';
    }
    return out;
}

Settings::Settings() {
    for (const auto& k : keys()) {
        values_[std::string(k.name)] = std::string(k.default_value);
        sources_[std::string(k.name)] = "default";
    }
}

void Settings::set(const std::string& key, const std::string& value, const std::string& source) {
    if (!values_.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    values_[key] = value;
    sources_[key] = source;
}

void Settings::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        auto t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
        auto key = text::trim(std::string_view(t).substr(0, eq));
        auto value = text::trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (!values_.count(key)) throw ConfigError(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
        set(key, value, "file");
    }
}

void Settings::apply_env(const std::function<const char*(const char*)>& getenv) {
    for (const auto& k : keys()) {
        if (const char* v = getenv(env_name(k.name).c_str())) set(std::string(k.name), v, "env");
    }
}

const std::string& Settings::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

const std::string& Settings::source(const std::string& key) const { return sources_.at(key); }

bool RunConfig::kg_is_remote() const { return kg.rfind("http://", 0) == 0 || kg.rfind("https://", 0) == 0; }

namespace {

long long to_int(const Settings& s, const std::string& key, long long min) {
    const auto& v = s.get(key);
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
    if (out < min) throw ConfigError(key + ": must be at least " + std::to_string(min));
    return out;
}

double to_double(const Settings& s, const std::string& key) {
    const auto& v = s.get(key);
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + v + "' is not a number");
    }
}

}  // namespace

RunConfig resolve(const Settings& s) {
    RunConfig c;
    const auto& llm = s.get("llm");
    if (llm == "http") c.llm = LlmKind::Http;
    else if (llm == "scripted") c.llm = LlmKind::Scripted;
    else throw ConfigError("llm: expected http or scripted, got '" + llm + "'");
    c.script = s.get("script");
    if (c.llm == LlmKind::Scripted && c.script.empty()) throw ConfigError("script: required when llm=scripted");
    c.llm_endpoint = s.get("llm_endpoint");
    c.llm_model = s.get("llm_model");
    c.api_key_env = s.get("api_key_env");
    c.kg = s.get("kg");
    c.kg_timeout = std::chrono::milliseconds(to_int(s, "kg_timeout_ms", 1));
    c.result_cap = static_cast<std::size_t>(to_int(s, "result_cap", 1));

    auto& p = c.pipeline;
    auto method = method_from_string(s.get("method"));
    if (!method) throw ConfigError("method: expected pdrr, pdr, io or cot");
    p.method = *method;
    auto ts = type_source_from_string(s.get("type_source"));
    if (!ts) throw ConfigError("type_source: expected predicted or gold");
    p.type_source = *ts;
    p.beam.width = static_cast<std::size_t>(to_int(s, "width", 1));
    p.beam.relation_keep = static_cast<std::size_t>(to_int(s, "relation_keep", 1));
    p.beam.candidate_cap = static_cast<std::size_t>(to_int(s, "candidate_cap", 1));
    auto r = answer::rendering_from_string(s.get("rendering"));
    if (!r) throw ConfigError("rendering: expected triples or sentences");
    p.rendering = *r;
    p.temperature = to_double(s, "temperature");
    if (p.temperature < 0.0 || p.temperature > 1.0) throw ConfigError("temperature: must lie in [0, 1]");
    p.intermediate_max_tokens = static_cast<int>(to_int(s, "max_tokens", 1));
    p.final_max_tokens = static_cast<int>(to_int(s, "final_max_tokens", 1));
    p.timeout = std::chrono::milliseconds(to_int(s, "timeout", 0) * 1000);

    if (p.method == Method::Pdrr && c.kg.empty()) throw ConfigError("kg: required for method pdrr");
    c.templates = s.get("templates");
    c.cache = s.get("cache");
    c.workers = static_cast<std::size_t>(to_int(s, "workers", 1));
    c.trace_dir = s.get("trace_dir");
    auto df = eval::dataset_format_from_string(s.get("dataset_format"));
    if (!df) throw ConfigError("dataset_format: expected auto, cwq, webqsp or generic");
    c.dataset_format = *df;
    c.log_level = s.get("log_level");
    return c;
}

nlohmann::json digest_fields(const RunConfig& c, const std::string& llm_id, const std::string& llm_model) {
    const auto& p = c.pipeline;
    return {{"llm", llm_id},
            {"model", llm_model},
            {"method", to_string(p.method)},
            {"type_source", to_string(p.type_source)},
            {"width", p.beam.width},
            {"relation_keep", p.beam.relation_keep},
            {"candidate_cap", p.beam.candidate_cap},
            {"rendering", answer::to_string(p.rendering)},
            {"temperature", p.temperature},
            {"max_tokens", p.intermediate_max_tokens},
            {"final_max_tokens", p.final_max_tokens},
            {"templates", c.templates.empty() ? "builtin" : "custom"}};
}

}  // namespace pdrr::config
