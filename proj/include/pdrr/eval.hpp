#pragma once
// Dataset loading, Hits@1 scoring and batch evaluation with per-type reports.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdrr/kg_store.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/pipeline.hpp"
#include "pdrr/prompts.hpp"

namespace pdrr::eval {

enum class DatasetFormat { Auto, Cwq, WebQsp, Generic };

std::optional<DatasetFormat> dataset_format_from_string(std::string_view s);

inline constexpr std::string_view kQuestionTypes[] = {"composition", "conjunction", "comparative", "superlative"};
inline constexpr std::string_view kUnlabeled = "unlabeled";

struct DatasetRecord {
    std::string id;
    std::string question;
    std::vector<std::vector<std::string>> gold_answers;  // one alias list per gold entity
    std::optional<std::string> qtype_label;

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

/// JSONL, a JSON array, or {"Questions": [...]}. Throws FormatError naming
/// the line (JSONL) or record index (arrays).
std::vector<DatasetRecord> load_dataset(std::istream& in, DatasetFormat format = DatasetFormat::Auto);
std::vector<DatasetRecord> load_dataset_file(const std::string& path, DatasetFormat format = DatasetFormat::Auto);

/// Lower-case; `-`, `_` and `/` become spaces; other ASCII punctuation is
/// dropped; whitespace collapsed.
std::string normalize_answer(std::string_view s);

/// First predicted answer against every alias: equal or contained in the
/// other on token boundaries, after normalize_answer.
bool hits_at_1(const std::vector<std::string>& predicted, const std::vector<std::vector<std::string>>& gold);

struct RunRecord {
    std::string id;
    std::string question;
    std::optional<std::string> qtype_label;
    std::optional<std::string> predicted_qtype;
    std::string final_answer;
    std::vector<std::string> ranked;
    bool hit = false;
    bool fallback_used = false;
    std::string error_class;  // empty on success
    std::string error_message;
    double wall_ms = 0.0;
    std::size_t llm_calls = 0;  // requests, cached or not
    std::size_t backend_calls = 0;
    std::size_t cache_hits = 0;
    long tokens = 0;
    nlohmann::json trace;
};

nlohmann::json to_json(const RunRecord& r);

struct TypeBucket {
    std::size_t count = 0;
    std::size_t hits = 0;
};

struct EvalReport {
    std::string method;
    std::string type_source;
    std::string rendering;
    std::size_t beam_width = 0;
    std::string config_digest;
    std::size_t total = 0;
    std::size_t hits = 0;
    std::size_t llm_requests = 0;
    std::map<std::string, TypeBucket> buckets;  // composition ... superlative, unlabeled
    std::map<std::string, std::size_t> errors;  // error class -> count

    double overall() const { return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
};

nlohmann::json to_json(const EvalReport& r);
/// Aligned columns: All, Composition, Conjunction, Comparative, Superlative
/// (and Unlabeled when present), as percentages with one decimal.
std::string render_table(const EvalReport& r);

struct EvalOptions {
    std::size_t workers = 1;
    std::optional<std::string> trace_dir;  // one <id>.json per record
    llm::RetryPolicy retry{};
};

struct EvalResult {
    EvalReport report;
    std::vector<RunRecord> records;  // dataset order
    std::size_t backend_calls = 0;
};

/// Per-record failures become misses carrying the error class.
EvalResult evaluate(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                    const kg::KgBackend* kg, llm::LlmBackend& backend, llm::ResponseCache* cache,
                    const prompts::TemplateSet& templates, const std::string& config_digest,
                    const EvalOptions& options = {});

/// Short stable digest of a JSON configuration object.
std::string config_digest(const nlohmann::json& config);

}  // namespace pdrr::eval
