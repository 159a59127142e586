#include "pdrr/plan.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::plan {

using nlohmann::json;

std::string_view to_string(QuestionType t) {
    return t == QuestionType::Chain ? "chain" : "parallel";
}

std::optional<QuestionType> question_type_from_string(std::string_view s) {
    auto l = text::to_lower(text::trim(s));
    if (l == "chain" || l == "chain structure") return QuestionType::Chain;
    if (l == "parallel" || l == "parallel structure") return QuestionType::Parallel;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Terms and triples

TripleTerm TripleTerm::bound(std::string text) {
    TripleTerm t;
    t.value_ = std::move(text);
    return t;
}

TripleTerm TripleTerm::placeholder(std::string name, int index) {
    TripleTerm t;
    t.value_ = Placeholder{std::move(name), index};
    return t;
}

TripleTerm TripleTerm::parse(std::string_view raw) {
    auto s = text::trim(raw);
    auto hash = s.rfind('#');
    if (hash != std::string::npos && hash + 1 < s.size()) {
        auto digits = std::string_view(s).substr(hash + 1);
        bool all_digits = digits.size() <= 6 && std::all_of(digits.begin(), digits.end(), [](char c) {
                              return std::isdigit(static_cast<unsigned char>(c));
                          });
        auto name = text::trim(std::string_view(s).substr(0, hash));
        if (all_digits && !name.empty()) {
            int index = std::stoi(std::string(digits));
            if (index >= 1) return placeholder(std::move(name), index);
        }
    }
    return bound(std::move(s));
}

std::string TripleTerm::str() const {
    if (is_placeholder()) return slot().name + "#" + std::to_string(slot().index);
    return text();
}

std::string DecompositionTriple::str() const {
    const auto& h = reversed ? tail : head;
    const auto& t = reversed ? head : tail;
    return "{" + h.str() + ", " + relation + ", " + t.str() + "}";
}

std::string DecompositionPlan::triples_str() const {
    std::vector<std::string> parts;
    for (const auto& t : triples) parts.push_back(t.str());
    return text::join(parts, ", ");
}

std::string to_prompt_text(const DecompositionPlan& plan) {
    std::vector<std::string> lines;
    for (const auto& t : plan.triples) {
        const auto& h = t.reversed ? t.tail : t.head;
        const auto& tl = t.reversed ? t.head : t.tail;
        json obj = json::object();
        // Built by hand to keep the key order the prompt shows.
        lines.push_back("{\"head\": " + json(h.str()).dump() + ", \"relation\": " +
                        json(t.relation).dump() + ", \"tail\": " + json(tl.str()).dump() + "}");
    }
    return text::join(lines, ",\n");
}

std::vector<DecompositionTriple> parse_decomposition(std::string_view response) {
    std::vector<DecompositionTriple> out;
    std::size_t pos = 0;
    while ((pos = response.find('{', pos)) != std::string_view::npos) {
        auto close = response.find_first_of("{}", pos + 1);
        if (close == std::string_view::npos) break;
        if (response[close] == '{') {  // nested: restart at the inner brace
            pos = close;
            continue;
        }
        auto j = json::parse(response.substr(pos, close - pos + 1), nullptr, false);
        pos = close + 1;
        if (j.is_discarded() || !j.is_object()) continue;
        if (!j.contains("head") || !j.contains("relation") || !j.contains("tail")) continue;
        if (!j["head"].is_string() || !j["relation"].is_string() || !j["tail"].is_string()) continue;
        DecompositionTriple t;
        t.head = TripleTerm::parse(j["head"].get<std::string>());
        t.relation = text::trim(j["relation"].get<std::string>());
        t.tail = TripleTerm::parse(j["tail"].get<std::string>());
        out.push_back(std::move(t));
    }
    if (out.empty()) throw UnparseableDecomposition("no {head, relation, tail} objects in response");
    return out;
}

json to_json(const DecompositionPlan& plan) {
    json triples = json::array();
    for (const auto& t : plan.triples) {
        const auto& h = t.reversed ? t.tail : t.head;
        const auto& tl = t.reversed ? t.head : t.tail;
        triples.push_back({{"head", h.str()}, {"relation", t.relation}, {"tail", tl.str()}});
    }
    return {{"question", plan.question}, {"qtype", to_string(plan.qtype)}, {"triples", triples}};
}

DecompositionPlan plan_from_json(const json& j) {
    DecompositionPlan p;
    p.question = j.at("question").get<std::string>();
    auto qt = question_type_from_string(j.at("qtype").get<std::string>());
    if (!qt) throw FormatError("unknown qtype in plan JSON");
    p.qtype = *qt;
    for (const auto& t : j.at("triples")) {
        p.triples.push_back({TripleTerm::parse(t.at("head").get<std::string>()),
                             t.at("relation").get<std::string>(),
                             TripleTerm::parse(t.at("tail").get<std::string>()), false});
    }
    if (p.qtype == QuestionType::Chain) normalize_chain(p);
    return p;
}

// ---------------------------------------------------------------------------
// Validation

void normalize_chain(DecompositionPlan& plan) {
    for (std::size_t i = 0; i < plan.triples.size(); ++i) {
        auto& t = plan.triples[i];
        if (t.reversed) continue;
        bool swap = false;
        if (i == 0) {
            swap = t.head.is_placeholder() && !t.tail.is_placeholder();
        } else {
            const auto& incoming = plan.triples[i - 1].tail;
            swap = !(t.head == incoming) && t.tail == incoming;
        }
        if (swap) {
            std::swap(t.head, t.tail);
            t.reversed = true;
        }
    }
}

namespace {

using Key = std::pair<std::string, int>;

Key key_of(const TripleTerm& t) { return {t.slot().name, t.slot().index}; }

bool empty_term(const TripleTerm& t) {
    return t.is_placeholder() ? t.slot().name.empty() || t.slot().index < 1 : text::trim(t.text()).empty();
}

}  // namespace

std::optional<std::string> plan_violation(const DecompositionPlan& plan) {
    const auto& ts = plan.triples;
    if (ts.empty()) return "empty: plan has no triples";
    if (ts.size() > kMaxPlanTriples) {
        return "too-long: " + std::to_string(ts.size()) + " triples exceed the cap of " +
               std::to_string(kMaxPlanTriples);
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (text::trim(ts[i].relation).empty()) return "empty-relation: triple " + std::to_string(i + 1);
        if (empty_term(ts[i].head) || empty_term(ts[i].tail)) {
            return "empty-term: triple " + std::to_string(i + 1);
        }
    }

    if (plan.qtype == QuestionType::Chain) {
        std::set<Key> seen;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto& t = ts[i];
            auto n = std::to_string(i + 1);
            if (i == 0) {
                if (t.head.is_placeholder()) return "anchor: triple 1 must start from a known entity";
            } else if (!(t.head == ts[i - 1].tail)) {
                return "adjacency: triple " + n + " does not start from " + ts[i - 1].tail.str();
            }
            // Only a closing hop may end on a known term; it checks the last unknown.
            if (!t.tail.is_placeholder()) {
                if (i > 0 && i + 1 == ts.size()) continue;
                return "placeholder-introduction: triple " + n + " introduces no placeholder";
            }
            if (!seen.insert(key_of(t.tail)).second) {
                return "placeholder-introduction: triple " + n + " reuses " + t.tail.str();
            }
        }
        return std::nullopt;
    }

    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& t = ts[i];
        auto n = std::to_string(i + 1);
        if (!t.head.is_placeholder() && !t.tail.is_placeholder()) {
            return "no-placeholder: triple " + n + " has no unknown";
        }
        if (t.head.is_placeholder() && t.tail.is_placeholder() && key_of(t.head) == key_of(t.tail)) {
            return "self-reference: triple " + n + " relates " + t.head.str() + " to itself";
        }
    }
    return std::nullopt;
}

void validate_plan(const DecompositionPlan& plan) {
    if (auto v = plan_violation(plan)) throw InvalidPlan(*v);
}

// ---------------------------------------------------------------------------
// LLM-backed operations

namespace {

constexpr std::string_view kChainMarker = "chain structure";
constexpr std::string_view kParallelMarker = "parallel structure";

std::optional<QuestionType> earliest_marker(std::string_view s) {
    auto l = text::to_lower(s);
    auto c = l.find(kChainMarker);
    auto p = l.find(kParallelMarker);
    if (c == std::string::npos && p == std::string::npos) return std::nullopt;
    return c < p ? QuestionType::Chain : QuestionType::Parallel;
}

llm::Completion ask(PlanContext& ctx, prompts::TemplateId id, const llm::Bindings& b, int attempt) {
    auto rendered = llm::render_prompt(ctx.templates.get(id), b);
    llm::CompletionRequest req;
    req.prompt = std::move(rendered.text);
    req.query_offset = rendered.query_offset;
    req.template_name = std::string(prompts::template_name(id));
    req.max_tokens = ctx.max_tokens;
    req.temperature = ctx.temperature;
    req.attempt = attempt;
    return ctx.llm.complete(req);
}

}  // namespace

QuestionType parse_question_type(std::string_view response) {
    auto open = response.find('{');
    if (open != std::string_view::npos) {
        auto close = response.find('}', open + 1);
        if (close != std::string_view::npos) {
            if (auto t = earliest_marker(response.substr(open + 1, close - open - 1))) return *t;
        }
    }
    if (auto t = earliest_marker(response)) return *t;
    throw UnparseableType("response names neither Chain Structure nor Parallel Structure");
}

QuestionType predict_question_type(std::string_view question, PlanContext& ctx,
                                   std::vector<std::string>* call_ids) {
    if (text::trim(question).empty()) throw std::invalid_argument("question is empty");
    auto c = ask(ctx, prompts::TemplateId::QuestionType, {{"question", std::string(question)}}, 0);
    if (call_ids) call_ids->push_back(c.call_id);
    return parse_question_type(c.text);
}

TypePrediction predict_question_type_with_default(std::string_view question, PlanContext& ctx) {
    if (text::trim(question).empty()) throw std::invalid_argument("question is empty");
    TypePrediction out;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto c = ask(ctx, prompts::TemplateId::QuestionType, {{"question", std::string(question)}}, attempt);
        out.call_ids.push_back(c.call_id);
        out.attempts = attempt + 1;
        try {
            out.qtype = parse_question_type(c.text);
            return out;
        } catch (const UnparseableType&) {
        }
    }
    out.qtype = QuestionType::Chain;
    out.defaulted = true;
    return out;
}

DecompositionPlan decompose_question(std::string_view question, QuestionType qtype, PlanContext& ctx,
                                     std::vector<std::string>* call_ids) {
    if (text::trim(question).empty()) throw std::invalid_argument("question is empty");
    std::string type_text = qtype == QuestionType::Chain ? "Chain Structure" : "Parallel Structure";
    auto c = ask(ctx, prompts::TemplateId::Decompose,
                 {{"question", std::string(question)}, {"question_type", type_text}}, 0);
    if (call_ids) call_ids->push_back(c.call_id);
    DecompositionPlan plan;
    plan.question = std::string(question);
    plan.qtype = qtype;
    plan.triples = parse_decomposition(c.text);
    if (qtype == QuestionType::Chain) normalize_chain(plan);
    validate_plan(plan);
    return plan;
}

}  // namespace pdrr::plan
