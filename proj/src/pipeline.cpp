#include "pdrr/pipeline.hpp"

#include <utility>

#include "pdrr/deadline.hpp"
#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr {

using nlohmann::json;

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Pdrr: return "pdrr";
        case Method::Pdr: return "pdr";
        case Method::Io: return "io";
        case Method::Cot: return "cot";
    }
    return "pdrr";
}

std::string_view to_string(TypeSource t) { return t == TypeSource::Gold ? "gold" : "predicted"; }

std::optional<Method> method_from_string(std::string_view s) {
    auto l = text::to_lower(text::trim(s));
    if (l == "pdrr") return Method::Pdrr;
    if (l == "pdr") return Method::Pdr;
    if (l == "io") return Method::Io;
    if (l == "cot") return Method::Cot;
    return std::nullopt;
}

std::optional<TypeSource> type_source_from_string(std::string_view s) {
    auto l = text::to_lower(text::trim(s));
    if (l == "predicted") return TypeSource::Predicted;
    if (l == "gold") return TypeSource::Gold;
    return std::nullopt;
}

std::optional<plan::QuestionType> gold_question_type(std::string_view label) {
    auto l = text::to_lower(text::trim(label));
    if (l == "composition") return plan::QuestionType::Chain;
    if (l == "conjunction" || l == "comparative" || l == "superlative") return plan::QuestionType::Parallel;
    return std::nullopt;
}

namespace {

struct Run {
    const std::string& question;
    const PipelineConfig& config;
    Backends& b;
    Deadline deadline;
    json& trace;
    QuestionResult result;

    answer::AnswerContext answer_ctx() {
        return {b.llm, b.templates, config.rendering, config.temperature, config.final_max_tokens, deadline};
    }

    reason::ReasonContext reason_ctx() {
        if (!b.kg) throw ConfigError("this method needs a knowledge-graph backend");
        return {*b.kg,
                b.llm,
                b.templates,
                config.beam,
                config.temperature,
                config.intermediate_max_tokens,
                deadline};
    }

    plan::QuestionType question_type(const std::optional<std::string>& label) {
        plan::PlanContext pc{b.llm, b.templates, config.temperature, config.intermediate_max_tokens};
        if (config.type_source == TypeSource::Gold && label) {
            if (auto t = gold_question_type(*label)) {
                trace["type"] = {{"source", "gold"}, {"label", *label}, {"qtype", plan::to_string(*t)}};
                return *t;
            }
        }
        deadline.check("type prediction");
        auto p = plan::predict_question_type_with_default(question, pc);
        trace["type"] = {{"source", "predicted"},
                         {"qtype", plan::to_string(p.qtype)},
                         {"defaulted", p.defaulted},
                         {"attempts", p.attempts},
                         {"llm_call_ids", p.call_ids}};
        return p.qtype;
    }

    plan::DecompositionPlan decompose(plan::QuestionType qt) {
        plan::PlanContext pc{b.llm, b.templates, config.temperature, config.intermediate_max_tokens};
        deadline.check("decomposition");
        std::vector<std::string> ids;
        auto p = plan::decompose_question(question, qt, pc, &ids);
        trace["plan"] = plan::to_json(p);
        trace["plan"]["llm_call_ids"] = ids;
        return p;
    }

    answer::Answer pdr_fallback(const plan::DecompositionPlan& p, const Error& why) {
        trace["fallback"] = "pdr";
        trace["fallback_reason"] = {{"error", why.kind()}, {"message", why.what()}};
        result.fallback = "pdr";
        auto ctx = answer_ctx();
        auto a = answer::answer_pdr(question, p, ctx);
        a.fallback_used = true;
        return a;
    }

    answer::Answer pdrr(const plan::DecompositionPlan& p) {
        auto ctx = reason_ctx();
        json reasoning = json::object();
        if (p.qtype == plan::QuestionType::Chain) {
            std::vector<reason::ReasoningChain> chains;
            try {
                chains = reason::chain_reason(p, ctx, &reasoning);
            } catch (const EntityNotFound& e) {
                trace["reasoning"] = std::move(reasoning);
                return pdr_fallback(p, e);
            } catch (const DeadEnd& e) {
                trace["reasoning"] = std::move(reasoning);
                return pdr_fallback(p, e);
            } catch (const NoCandidates& e) {
                trace["reasoning"] = std::move(reasoning);
                return pdr_fallback(p, e);
            }
            auto sel = reason::select_best_chain(question, chains, ctx);
            reasoning["selected"] = sel.index;
            reasoning["selection_fallback"] = sel.fallback;
            reasoning["selection_call_id"] = sel.call_id ? json(*sel.call_id) : json(nullptr);
            trace["reasoning"] = std::move(reasoning);
            auto actx = answer_ctx();
            return answer::answer_chain(question, p, chains[sel.index], actx);
        }
        auto sets = reason::parallel_reason(p, ctx, &reasoning);
        trace["reasoning"] = std::move(reasoning);
        auto actx = answer_ctx();
        try {
            return answer::answer_parallel(question, p, sets, actx);
        } catch (const NoCandidates& e) {
            return pdr_fallback(p, e);
        }
    }
};

}  // namespace

QuestionResult run_question(const std::string& question, const std::optional<std::string>& qtype_label,
                            const PipelineConfig& config, Backends& backends, json* partial_trace) {
    if (text::trim(question).empty()) throw std::invalid_argument("question is empty");
    json trace = {{"question", question}, {"method", to_string(config.method)}};
    Run run{question, config, backends,
            config.timeout.count() > 0 ? Deadline(config.timeout) : Deadline(), trace, {}};
    try {
        switch (config.method) {
            case Method::Io: {
                auto ctx = run.answer_ctx();
                run.result.answer = answer::answer_io(question, ctx);
                break;
            }
            case Method::Cot: {
                auto ctx = run.answer_ctx();
                run.result.answer = answer::answer_cot(question, ctx);
                break;
            }
            case Method::Pdr:
            case Method::Pdrr: {
                auto qt = run.question_type(qtype_label);
                run.result.qtype = qt;
                auto p = run.decompose(qt);
                if (config.method == Method::Pdr) {
                    auto ctx = run.answer_ctx();
                    run.result.answer = answer::answer_pdr(question, p, ctx);
                } else {
                    run.result.answer = run.pdrr(p);
                }
                break;
            }
        }
    } catch (...) {
        if (partial_trace) *partial_trace = trace;
        throw;
    }
    trace["answer"] = answer::to_json(run.result.answer);
    run.result.trace = std::move(trace);
    return std::move(run.result);
}

}  // namespace pdrr
