#pragma once
// One question through a chosen method: full PDRR, plan-only PDR, or the IO
// and CoT baselines.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pdrr/answer.hpp"
#include "pdrr/kg_store.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/plan.hpp"
#include "pdrr/prompts.hpp"
#include "pdrr/retrieve_reason.hpp"

namespace pdrr {

enum class Method { Pdrr, Pdr, Io, Cot };
enum class TypeSource { Predicted, Gold };

std::string_view to_string(Method m);
std::string_view to_string(TypeSource t);
std::optional<Method> method_from_string(std::string_view s);
std::optional<TypeSource> type_source_from_string(std::string_view s);

/// composition -> Chain; conjunction, comparative, superlative -> Parallel.
std::optional<plan::QuestionType> gold_question_type(std::string_view label);

struct PipelineConfig {
    Method method = Method::Pdrr;
    TypeSource type_source = TypeSource::Predicted;
    reason::BeamConfig beam{};
    answer::Rendering rendering = answer::Rendering::Triples;
    double temperature = llm::kDefaultTemperature;
    int intermediate_max_tokens = llm::kIntermediateMaxTokens;
    int final_max_tokens = llm::kFinalMaxTokens;
    std::chrono::milliseconds timeout{0};  // 0 disables the deadline
};

struct Backends {
    const kg::KgBackend* kg = nullptr;  // may be null for io/cot
    llm::LlmClient& llm;
    const prompts::TemplateSet& templates;
};

struct QuestionResult {
    answer::Answer answer;
    std::optional<plan::QuestionType> qtype;
    std::string fallback;  // "pdr" when retrieval dead-ended
    nlohmann::json trace;
};

/// Throws the pipeline error of the failing stage; a partial trace is stored
/// in `partial_trace` when given.
QuestionResult run_question(const std::string& question, const std::optional<std::string>& qtype_label,
                            const PipelineConfig& config, Backends& backends,
                            nlohmann::json* partial_trace = nullptr);

}  // namespace pdrr
