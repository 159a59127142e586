#pragma once
// Built-in prompt templates for every LLM call in the pipeline.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "pdrr/llm_gateway.hpp"

namespace pdrr::prompts {

enum class TemplateId {
    QuestionType,
    Decompose,
    RelationPrune,
    TriplePrune,
    ChainSelect,
    AnswerChain,
    AnswerParallel,
    AnswerIo,
    AnswerCot,
    AnswerPdrChain,
    AnswerPdrParallel,
};

inline constexpr std::size_t kTemplateCount = 11;

std::string_view template_name(TemplateId id);

// 5 shots for type prediction and every answering prompt, 3 for the rest.
std::size_t expected_shots(TemplateId id);

class TemplateSet {
public:
    static TemplateSet builtin();

    /// Built-ins overridden by `<name>.json` files found in `dir`
    /// ({"instruction", "query", "slots", "few_shot": [{"input","output"}]}).
    /// Every template is validated against its role's few-shot count.
    static TemplateSet from_directory(const std::string& dir);

    const llm::PromptTemplate& get(TemplateId id) const {
        return templates_[static_cast<std::size_t>(id)];
    }

private:
    std::array<llm::PromptTemplate, kTemplateCount> templates_;
};

}  // namespace pdrr::prompts
