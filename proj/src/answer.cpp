#include "pdrr/answer.hpp"

#include <utility>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::answer {

using nlohmann::json;

std::string_view to_string(Rendering r) { return r == Rendering::Triples ? "triples" : "sentences"; }

std::optional<Rendering> rendering_from_string(std::string_view s) {
    auto l = text::to_lower(text::trim(s));
    if (l == "triples") return Rendering::Triples;
    if (l == "sentences") return Rendering::Sentences;
    return std::nullopt;
}

std::optional<std::string> extract_final(std::string_view response) {
    std::optional<std::pair<std::size_t, std::size_t>> last;
    int depth = 0;
    std::size_t open = 0;
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (response[i] == '{') {
            if (depth++ == 0) open = i;
        } else if (response[i] == '}' && depth > 0) {
            if (--depth == 0) last = {open + 1, i};
        }
    }
    if (!last) return std::nullopt;
    auto inner = text::trim(response.substr(last->first, last->second - last->first));
    while (inner.size() >= 2 && (inner.front() == '\'' || inner.front() == '"') && inner.back() == inner.front()) {
        inner = text::trim(std::string_view(inner).substr(1, inner.size() - 2));
    }
    if (inner.empty()) return std::nullopt;
    return inner;
}

std::vector<std::string> split_ranked(std::string_view final_answer) {
    std::vector<std::string> out;
    for (const auto& part : text::split(final_answer, ", ")) {
        auto t = text::trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evidence

namespace {

std::vector<EvidenceTriple> step_evidence(const reason::ScoredTriple& s) { return s.shown_triples(); }

std::string as_triple(const EvidenceTriple& e) { return "{" + e.head + ", " + e.relation + ", " + e.tail + "}"; }
std::string as_sentence(const EvidenceTriple& e) { return e.head + " " + e.relation + " " + e.tail + "."; }

std::string render_list(const std::vector<EvidenceTriple>& ev, Rendering mode) {
    std::vector<std::string> parts;
    for (const auto& e : ev) parts.push_back(mode == Rendering::Triples ? as_triple(e) : as_sentence(e));
    return text::join(parts, mode == Rendering::Triples ? ", " : " ");
}

std::vector<EvidenceTriple> set_evidence(const reason::ReasoningTripleSet& s) {
    std::vector<EvidenceTriple> out;
    for (const auto& t : s.triples) {
        for (auto& e : step_evidence(t)) out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

std::vector<EvidenceTriple> chain_evidence(const reason::ReasoningChain& chain) {
    std::vector<EvidenceTriple> out;
    for (const auto& s : chain.steps) {
        for (auto& e : step_evidence(s)) out.push_back(std::move(e));
    }
    return out;
}

std::string render_chain_evidence(const reason::ReasoningChain& chain, Rendering mode) {
    return render_list(chain_evidence(chain), mode);
}

std::string render_parallel_evidence(const plan::DecompositionPlan& plan,
                                     const std::vector<reason::ReasoningTripleSet>& sets, Rendering mode) {
    std::vector<std::string> branches;
    for (const auto& s : sets) {
        std::string body;
        if (s.skipped && s.branch_index < plan.triples.size()) {
            // No anchor to retrieve from: the plan triple goes through as written.
            const auto& dt = plan.triples[s.branch_index];
            body = mode == Rendering::Triples ? dt.str() : dt.head.str() + " " + dt.relation + " " + dt.tail.str() + ".";
        } else {
            body = render_list(set_evidence(s), mode);
        }
        branches.push_back(mode == Rendering::Triples ? "{" + body + "}" : body);
    }
    if (mode == Rendering::Triples) return "{" + text::join(branches, ", ") + "}";
    return text::join(branches, "\n");
}

// ---------------------------------------------------------------------------
// Answering

namespace {

Answer ask_final(prompts::TemplateId id, const llm::Bindings& b, AnswerContext& ctx, std::string mode) {
    Answer out;
    out.mode = std::move(mode);
    auto rendered = llm::render_prompt(ctx.templates.get(id), b);
    for (int attempt = 0; attempt < 2; ++attempt) {
        ctx.deadline.check("answering");
        llm::CompletionRequest req;
        req.prompt = rendered.text;
        req.query_offset = rendered.query_offset;
        req.template_name = std::string(prompts::template_name(id));
        req.max_tokens = ctx.max_tokens;
        req.temperature = ctx.temperature;
        req.attempt = attempt;
        auto c = ctx.llm.complete(req);
        out.call_ids.push_back(c.call_id);
        out.rationale = c.text;
        if (auto f = extract_final(c.text)) {
            out.final_answer = *f;
            out.ranked = split_ranked(*f);
            if (out.ranked.empty()) out.ranked.push_back(*f);
            return out;
        }
    }
    throw UnparseableAnswer("no {answer} group after retry");
}

}  // namespace

Answer answer_chain(const std::string& question, const plan::DecompositionPlan& plan,
                    const reason::ReasoningChain& best_chain, AnswerContext& ctx) {
    if (best_chain.steps.empty()) throw NoCandidates("empty reasoning chain");
    auto evidence = render_chain_evidence(best_chain, ctx.rendering);
    auto a = ask_final(prompts::TemplateId::AnswerChain,
                       {{"question", question}, {"decomposition", plan.triples_str()}, {"chain", evidence}}, ctx,
                       "chain");
    a.evidence = chain_evidence(best_chain);
    a.evidence_text = std::move(evidence);
    return a;
}

Answer answer_parallel(const std::string& question, const plan::DecompositionPlan& plan,
                       const std::vector<reason::ReasoningTripleSet>& sets, AnswerContext& ctx) {
    bool any = false, empty_branch = false;
    for (const auto& s : sets) {
        if (s.skipped) continue;
        (s.triples.empty() ? empty_branch : any) = true;
    }
    if (!any) throw NoCandidates("every parallel branch is empty");
    auto evidence = render_parallel_evidence(plan, sets, ctx.rendering);
    auto a = ask_final(prompts::TemplateId::AnswerParallel,
                       {{"question", question}, {"decomposition", plan.triples_str()}, {"triples", evidence}}, ctx,
                       "parallel");
    for (const auto& s : sets) {
        for (auto& e : set_evidence(s)) a.evidence.push_back(std::move(e));
    }
    a.evidence_text = std::move(evidence);
    a.fallback_used = empty_branch;
    return a;
}

Answer answer_io(const std::string& question, AnswerContext& ctx) {
    return ask_final(prompts::TemplateId::AnswerIo, {{"question", question}}, ctx, "io");
}

Answer answer_cot(const std::string& question, AnswerContext& ctx) {
    return ask_final(prompts::TemplateId::AnswerCot, {{"question", question}}, ctx, "cot");
}

Answer answer_pdr(const std::string& question, const plan::DecompositionPlan& plan, AnswerContext& ctx) {
    plan::validate_plan(plan);
    bool chain = plan.qtype == plan::QuestionType::Chain;
    return ask_final(chain ? prompts::TemplateId::AnswerPdrChain : prompts::TemplateId::AnswerPdrParallel,
                     {{"question", question}, {"decomposition", plan.triples_str()}}, ctx,
                     chain ? "pdr-chain" : "pdr-parallel");
}

json to_json(const Answer& a) {
    json ev = json::array();
    for (const auto& e : a.evidence) ev.push_back({e.head, e.relation, e.tail});
    return {{"final", a.final_answer},   {"ranked_answers", a.ranked}, {"rationale", a.rationale},
            {"mode", a.mode},            {"fallback_used", a.fallback_used}, {"llm_call_ids", a.call_ids},
            {"evidence", ev},            {"evidence_text", a.evidence_text}};
}

}  // namespace pdrr::answer
