#pragma once
// Run configuration. Every key has a default; a flat `key = value` file,
// PDRR_<KEY> environment variables and command-line flags override it, in
// that order of increasing precedence.

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pdrr/eval.hpp"
#include "pdrr/pipeline.hpp"

namespace pdrr::config {

struct KeyInfo {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

const std::vector<KeyInfo>& keys();

/// `width` -> `PDRR_WIDTH`
std::string env_name(std::string_view key);
/// `relation_keep` -> `relation-keep`
std::string flag_name(std::string_view key);

class Settings {
public:
    Settings();  // defaults

    /// `key = value` lines; `#` starts a comment line. Throws ConfigError on
    /// unknown keys or malformed lines.
    void apply_file(const std::string& path);
    void apply_env(const std::function<const char*(const char*)>& getenv);
    void set(const std::string& key, const std::string& value, const std::string& source);

    const std::string& get(const std::string& key) const;
    const std::string& source(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> sources_;
};

enum class LlmKind { Http, Scripted };

struct RunConfig {
    LlmKind llm = LlmKind::Http;
    std::string script;  // scripted responses (JSONL)
    std::string llm_endpoint;
    std::string llm_model;
    std::string api_key_env;
    std::string kg;  // graph file, or an http(s) SPARQL endpoint
    std::chrono::milliseconds kg_timeout{10000};
    std::size_t result_cap = 2000;
    PipelineConfig pipeline;
    std::string templates;  // directory of template overrides
    std::string cache;      // empty keeps the cache in memory
    std::size_t workers = 1;
    std::string trace_dir;
    eval::DatasetFormat dataset_format = eval::DatasetFormat::Auto;
    std::string log_level;

    bool kg_is_remote() const;
};

/// Validates every value; throws ConfigError naming the key.
RunConfig resolve(const Settings& s);

/// The fields that change results, for report digests.
nlohmann::json digest_fields(const RunConfig& c, const std::string& llm_id, const std::string& llm_model);

}  // namespace pdrr::config
