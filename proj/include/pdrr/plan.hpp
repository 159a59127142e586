#pragma once
// Plan module: question-structure prediction and decomposition into triples
// whose unknowns are indexed placeholders (`entity#index`).

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pdrr/llm_gateway.hpp"
#include "pdrr/prompts.hpp"

namespace pdrr::plan {

enum class QuestionType { Chain, Parallel };

std::string_view to_string(QuestionType t);
std::optional<QuestionType> question_type_from_string(std::string_view s);

inline constexpr std::size_t kMaxPlanTriples = 4;

struct Placeholder {
    std::string name;
    int index = 1;

    friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

/// Either a bound surface string or a placeholder for an unknown entity.
class TripleTerm {
public:
    TripleTerm() = default;
    static TripleTerm bound(std::string text);
    static TripleTerm placeholder(std::string name, int index);

    /// `name#index` with index >= 1 parses as a placeholder, anything else is bound.
    static TripleTerm parse(std::string_view text);

    bool is_placeholder() const noexcept { return std::holds_alternative<Placeholder>(value_); }
    const std::string& text() const { return std::get<std::string>(value_); }
    const Placeholder& slot() const { return std::get<Placeholder>(value_); }

    std::string str() const;

    friend bool operator==(const TripleTerm&, const TripleTerm&) = default;

private:
    std::variant<std::string, Placeholder> value_;
};

struct DecompositionTriple {
    TripleTerm head;
    std::string relation;
    TripleTerm tail;
    // Set when a chain triple arrived with the known term in the tail; head
    // and tail were swapped so the chain reads left to right. Retrieval then
    // searches from the known side in the original direction.
    bool reversed = false;

    // `{head, relation, tail}` in the original orientation.
    std::string str() const;

    friend bool operator==(const DecompositionTriple&, const DecompositionTriple&) = default;
};

struct DecompositionPlan {
    std::string question;
    QuestionType qtype = QuestionType::Chain;
    std::vector<DecompositionTriple> triples;

    // `{a, r, b}, {c, r, d}` as used inside answering prompts.
    std::string triples_str() const;

    friend bool operator==(const DecompositionPlan&, const DecompositionPlan&) = default;
};

/// The JSON-object lines the decomposition prompt asks the model to emit.
std::string to_prompt_text(const DecompositionPlan& plan);

/// Parse every `{"head":…, "relation":…, "tail":…}` object in order.
/// Throws UnparseableDecomposition when none is found.
std::vector<DecompositionTriple> parse_decomposition(std::string_view response);

nlohmann::json to_json(const DecompositionPlan& plan);
DecompositionPlan plan_from_json(const nlohmann::json& j);

/// First violated rule, or nullopt when the plan is acceptable.
std::optional<std::string> plan_violation(const DecompositionPlan& plan);

/// Throws InvalidPlan(reason) on the first violated rule.
void validate_plan(const DecompositionPlan& plan);

/// Orient chain triples so each one starts from the previous unknown.
/// Triples whose known term sits in the tail are swapped and marked reversed.
void normalize_chain(DecompositionPlan& plan);

/// Reads the first `{...}` group for "Chain Structure" / "Parallel Structure"
/// (case-insensitive) and falls back to the first marker anywhere in the text.
/// Throws UnparseableType when neither marker occurs.
QuestionType parse_question_type(std::string_view response);

struct TypePrediction {
    QuestionType qtype = QuestionType::Chain;
    bool defaulted = false;  // both attempts unparseable, Chain assumed
    int attempts = 0;
    std::vector<std::string> call_ids;
};

struct PlanContext {
    llm::LlmClient& llm;
    const prompts::TemplateSet& templates;
    double temperature = llm::kDefaultTemperature;
    int max_tokens = llm::kIntermediateMaxTokens;
};

/// One LLM call; throws UnparseableType on an unusable reply.
QuestionType predict_question_type(std::string_view question, PlanContext& ctx,
                                   std::vector<std::string>* call_ids = nullptr);

/// Retries once, then defaults to Chain.
TypePrediction predict_question_type_with_default(std::string_view question, PlanContext& ctx);

/// Decompose, normalize chain orientation, and validate.
DecompositionPlan decompose_question(std::string_view question, QuestionType qtype, PlanContext& ctx,
                                     std::vector<std::string>* call_ids = nullptr);

}  // namespace pdrr::plan
