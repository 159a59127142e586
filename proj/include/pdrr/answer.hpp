#pragma once
// Final answering from question, plan and evidence, plus the evidence-free
// baselines (IO, CoT, PDR).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdrr/deadline.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/plan.hpp"
#include "pdrr/prompts.hpp"
#include "pdrr/retrieve_reason.hpp"

namespace pdrr::answer {

enum class Rendering { Triples, Sentences };

std::string_view to_string(Rendering r);
std::optional<Rendering> rendering_from_string(std::string_view s);

/// One evidence triple as shown to the model (labels, not ids).
using EvidenceTriple = reason::LabeledTriple;

struct Answer {
    std::string final_answer;
    std::vector<std::string> ranked;  // final answer split on ", "
    std::string rationale;            // full response text
    bool fallback_used = false;
    std::vector<std::string> call_ids;
    std::string mode;  // chain | parallel | io | cot | pdr-chain | pdr-parallel
    std::vector<EvidenceTriple> evidence;
    std::string evidence_text;  // what the prompt carried
};

/// Content of the last top-level `{...}` group, trimmed and unquoted.
std::optional<std::string> extract_final(std::string_view response);
std::vector<std::string> split_ranked(std::string_view final_answer);

std::vector<EvidenceTriple> chain_evidence(const reason::ReasoningChain& chain);
std::string render_chain_evidence(const reason::ReasoningChain& chain, Rendering mode);
std::string render_parallel_evidence(const plan::DecompositionPlan& plan,
                                     const std::vector<reason::ReasoningTripleSet>& sets, Rendering mode);

struct AnswerContext {
    llm::LlmClient& llm;
    const prompts::TemplateSet& templates;
    Rendering rendering = Rendering::Triples;
    double temperature = llm::kDefaultTemperature;
    int max_tokens = llm::kFinalMaxTokens;
    Deadline deadline{};
};

Answer answer_chain(const std::string& question, const plan::DecompositionPlan& plan,
                    const reason::ReasoningChain& best_chain, AnswerContext& ctx);
Answer answer_parallel(const std::string& question, const plan::DecompositionPlan& plan,
                       const std::vector<reason::ReasoningTripleSet>& sets, AnswerContext& ctx);
Answer answer_io(const std::string& question, AnswerContext& ctx);
Answer answer_cot(const std::string& question, AnswerContext& ctx);
Answer answer_pdr(const std::string& question, const plan::DecompositionPlan& plan, AnswerContext& ctx);

nlohmann::json to_json(const Answer& a);

}  // namespace pdrr::answer
