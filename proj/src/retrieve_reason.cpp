#include "pdrr/retrieve_reason.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <regex>
#include <set>
#include <unordered_map>
#include <utility>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::reason {

using nlohmann::json;

namespace {

// `{text (Score: 0.4)}`; the text group is whatever precedes the score.
const std::regex& scored_item_re() {
    static const std::regex re(
        R"(\{\s*([^{}]*?)\s*\(\s*[Ss]core\s*:\s*([+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\)\s*\})");
    return re;
}

struct ScoredItem {
    std::string text;
    double score;
};

std::vector<ScoredItem> scored_items(std::string_view response) {
    std::vector<ScoredItem> out;
    std::string s(response);
    for (std::sregex_iterator it(s.begin(), s.end(), scored_item_re()), end; it != end; ++it) {
        double v = 0.0;
        try {
            v = std::stod((*it)[2].str());
        } catch (const std::exception&) {
            continue;
        }
        if (!std::isfinite(v) || v < 0.0) continue;
        out.push_back({(*it)[1].str(), v});
    }
    return out;
}

// Case- and whitespace-insensitive key with a trailing period removed.
std::string match_key(std::string_view s) {
    auto t = text::trim(s);
    while (!t.empty() && t.back() == '.') t.pop_back();
    return text::to_lower(text::collapse_whitespace(t));
}

void renormalize(std::vector<ScoredRelation>& rs) {
    double mx = 0.0;
    for (const auto& r : rs) mx = std::max(mx, r.score);
    if (mx <= 0.0) return;
    double sum = 0.0;
    for (auto& r : rs) {
        r.score /= mx;
        sum += r.score;
    }
    for (auto& r : rs) r.score /= sum;
}

bool triple_less(const ScoredTriple& a, const ScoredTriple& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.triple.head != b.triple.head) return a.triple.head < b.triple.head;
    if (a.triple.tail != b.triple.tail) return a.triple.tail < b.triple.tail;
    return a.reached < b.reached;
}

llm::Completion ask(ReasonContext& ctx, prompts::TemplateId id, const llm::Bindings& b) {
    ctx.deadline.check(prompts::template_name(id).data());
    auto rendered = llm::render_prompt(ctx.templates.get(id), b);
    llm::CompletionRequest req;
    req.prompt = std::move(rendered.text);
    req.query_offset = rendered.query_offset;
    req.template_name = std::string(prompts::template_name(id));
    req.max_tokens = ctx.max_tokens;
    req.temperature = ctx.temperature;
    return ctx.llm.complete(req);
}

std::string numbered(const std::vector<std::string>& items) {
    std::string out = "{";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += "\n";
        out += std::to_string(i + 1) + ". " + items[i];
    }
    return out + "}";
}

LabeledTriple labeled(const kg::Triple& t, const kg::KgBackend& kg) {
    return {kg.display_label(t.head), t.relation.str(), kg.display_label(t.tail)};
}

json relations_json(const std::vector<ScoredRelation>& rs) {
    json out = json::array();
    for (const auto& r : rs) out.push_back({{"relation", r.relation.str()}, {"score", r.score}});
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string ScoredTriple::prompt_text() const {
    return expansion_shown ? shown.str() + "; " + expansion_shown->str() : shown.str();
}

std::vector<LabeledTriple> ScoredTriple::shown_triples() const {
    std::vector<LabeledTriple> out{shown};
    if (expansion_shown) out.push_back(*expansion_shown);
    return out;
}

std::vector<kg::Triple> ScoredTriple::kg_triples() const {
    std::vector<kg::Triple> out{triple};
    if (expansion) out.push_back(*expansion);
    return out;
}

std::vector<kg::EntityId> ReasoningChain::bridges() const {
    std::vector<kg::EntityId> out;
    for (const auto& s : steps) out.push_back(s.reached);
    return out;
}

RelationPruneResult score_relations(std::string_view response, const std::vector<kg::Relation>& candidates,
                                    std::size_t keep) {
    if (candidates.empty()) throw NoCandidates("relation prune over an empty candidate set");
    keep = std::max<std::size_t>(keep, 1);

    std::unordered_map<std::string, std::size_t> exact, loose;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        exact.emplace(candidates[i].str(), i);
        loose.emplace(match_key(candidates[i].str()), i);
    }
    std::vector<std::optional<double>> scores(candidates.size());
    for (const auto& item : scored_items(response)) {
        auto name = text::trim(item.text);
        std::optional<std::size_t> idx;
        if (auto it = exact.find(name); it != exact.end()) {
            idx = it->second;
        } else if (auto jt = loose.find(match_key(name)); jt != loose.end()) {
            idx = jt->second;
        }
        if (idx && !scores[*idx]) scores[*idx] = item.score;
    }

    RelationPruneResult out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (scores[i] && *scores[i] > 0.0) out.relations.push_back({candidates[i], *scores[i]});
    }
    if (out.relations.empty()) {
        out.fallback = true;
        for (const auto& c : candidates) out.relations.push_back({c, 1.0});
    }
    std::sort(out.relations.begin(), out.relations.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.relation < b.relation;
    });
    // Duplicate candidate names collapse to one entry.
    out.relations.erase(std::unique(out.relations.begin(), out.relations.end(),
                                    [](const auto& a, const auto& b) { return a.relation == b.relation; }),
                        out.relations.end());
    if (out.relations.size() > keep) out.relations.resize(keep);
    renormalize(out.relations);
    return out;
}

TriplePruneResult score_triples(std::string_view response, std::vector<ScoredTriple> candidates, std::size_t k) {
    if (candidates.empty()) throw NoCandidates("triple prune over an empty candidate set");
    k = std::max<std::size_t>(k, 1);

    std::unordered_map<std::string, double> mentioned;
    for (const auto& item : scored_items(response)) mentioned.emplace(match_key(item.text), item.score);

    TriplePruneResult out;
    std::vector<ScoredTriple> scored;
    for (const auto& c : candidates) {
        auto it = mentioned.find(match_key(c.prompt_text()));
        if (it != mentioned.end() && it->second > 0.0) {
            auto t = c;
            t.score = it->second;
            scored.push_back(std::move(t));
        }
    }
    if (scored.empty()) {
        out.fallback = true;
        scored = std::move(candidates);
    }
    std::sort(scored.begin(), scored.end(), triple_less);
    if (scored.size() > k) scored.resize(k);
    out.triples = std::move(scored);
    return out;
}

std::vector<kg::Relation> cap_candidates(std::vector<kg::Relation> relations, std::string_view phrase,
                                         std::size_t cap) {
    std::sort(relations.begin(), relations.end());
    relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
    if (relations.size() <= cap) return relations;
    auto want = text::tokenize(phrase);
    std::set<std::string> want_set(want.begin(), want.end());
    std::vector<std::pair<std::size_t, std::size_t>> overlap;  // (count, index)
    for (std::size_t i = 0; i < relations.size(); ++i) {
        auto toks = text::tokenize(relations[i].str());
        std::size_t n = 0;
        for (const auto& tok : std::set<std::string>(toks.begin(), toks.end())) n += want_set.count(tok);
        overlap.emplace_back(n, i);
    }
    std::stable_sort(overlap.begin(), overlap.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<kg::Relation> out;
    for (std::size_t i = 0; i < cap; ++i) out.push_back(relations[overlap[i].second]);
    std::sort(out.begin(), out.end());
    return out;
}

kg::EntityId ground_anchor(const plan::TripleTerm& term, const kg::KgBackend& kg) {
    if (term.is_placeholder()) throw std::invalid_argument("cannot ground a placeholder");
    auto hits = kg.entity_match(term.text());
    if (hits.items.empty()) throw EntityNotFound("no entity matches '" + term.text() + "'");
    return hits.items.front().id;
}

RelationPruneResult prune_relations(const std::string& triple_text, std::vector<kg::Relation> candidates,
                                    ReasonContext& ctx, std::size_t keep) {
    if (candidates.empty()) throw NoCandidates("no relations to prune for " + triple_text);
    if (candidates.size() == 1) {
        RelationPruneResult out;
        out.relations.push_back({candidates.front(), 1.0});
        return out;
    }
    std::vector<std::string> names;
    for (const auto& r : candidates) names.push_back(r.str());
    auto c = ask(ctx, prompts::TemplateId::RelationPrune, {{"triple", triple_text}, {"relations", numbered(names)}});
    auto out = score_relations(c.text, candidates, keep);
    out.call_id = c.call_id;
    return out;
}

namespace {

// One extra hop out of an unnamed node: the best outgoing relation (by the
// same relation prune) and all of its targets, the anchor excluded.
std::vector<ScoredTriple> expand_cvt(const ScoredTriple& base, const kg::EntityId& cvt, const kg::EntityId& anchor,
                                     const std::string& triple_text, ReasonContext& ctx, json* trace) {
    std::map<kg::Relation, std::vector<kg::EntityId>> onward;
    for (const auto& r2 : ctx.kg.head_relation_search(cvt).items) {
        std::vector<kg::EntityId> targets;
        for (auto& t : ctx.kg.tail_entity_search(cvt, r2).items) {
            if (t != anchor) targets.push_back(std::move(t));
        }
        if (!targets.empty()) onward.emplace(r2, std::move(targets));
    }
    if (onward.empty()) return {base};

    std::vector<kg::Relation> rels;
    for (const auto& [r, _] : onward) rels.push_back(r);
    rels = cap_candidates(std::move(rels), triple_text, ctx.config.candidate_cap);
    auto pick = prune_relations(triple_text, rels, ctx, 1);
    const auto& best = pick.relations.front().relation;
    if (trace) {
        trace->push_back({{"cvt", cvt.str()},
                          {"relations", rels.size()},
                          {"chosen", best.str()},
                          {"fallback", pick.fallback},
                          {"call_id", pick.call_id ? json(*pick.call_id) : json(nullptr)}});
    }

    std::vector<ScoredTriple> out;
    for (const auto& t : onward.at(best)) {
        ScoredTriple s = base;
        s.expansion = kg::Triple{cvt, best, t};
        s.reached = t;
        s.expansion_shown = labeled(*s.expansion, ctx.kg);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<ScoredTriple> search_candidate_triples(const kg::EntityId& anchor,
                                                   const std::vector<ScoredRelation>& relations,
                                                   Direction direction, const std::string& triple_text,
                                                   ReasonContext& ctx, json* trace) {
    std::vector<ScoredTriple> out;
    json expansions = json::array();
    for (const auto& sr : relations) {
        ctx.deadline.check("triple search");
        bool head_side = direction == Direction::AnchorIsHead;
        auto others = head_side ? ctx.kg.tail_entity_search(anchor, sr.relation)
                                : ctx.kg.head_entity_search(anchor, sr.relation);
        for (const auto& other : others.items) {
            ScoredTriple s;
            s.triple = head_side ? kg::Triple{anchor, sr.relation, other} : kg::Triple{other, sr.relation, anchor};
            s.reached = other;
            s.score = sr.score;
            s.shown = labeled(s.triple, ctx.kg);
            if (ctx.kg.label(other)) {
                out.push_back(std::move(s));
            } else {
                for (auto& e : expand_cvt(s, other, anchor, triple_text, ctx, &expansions)) out.push_back(std::move(e));
            }
        }
    }
    if (trace && !expansions.empty()) (*trace)["expansions"] = std::move(expansions);
    return out;
}

TriplePruneResult prune_triples(const std::string& triple_text, std::vector<ScoredTriple> candidates,
                                ReasonContext& ctx, std::size_t k) {
    if (candidates.empty()) throw NoCandidates("no triples to prune for " + triple_text);
    if (candidates.size() == 1) {
        TriplePruneResult out;
        out.triples = std::move(candidates);
        return out;
    }
    std::vector<std::string> lines;
    for (const auto& c : candidates) lines.push_back(c.prompt_text());
    auto c = ask(ctx, prompts::TemplateId::TriplePrune, {{"filter_triple", triple_text}, {"triples", numbered(lines)}});
    auto out = score_triples(c.text, std::move(candidates), k);
    out.call_id = c.call_id;
    return out;
}

// ---------------------------------------------------------------------------
// Chains

namespace {

struct Partial {
    ReasoningChain chain;
    kg::EntityId frontier;
};

json scored_json(const std::vector<ScoredTriple>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back({{"triple", t.prompt_text()}, {"score", t.score}});
    return out;
}

}  // namespace

std::vector<ReasoningChain> chain_reason(const plan::DecompositionPlan& plan, ReasonContext& ctx, json* trace) {
    if (plan.qtype != plan::QuestionType::Chain) throw std::invalid_argument("chain_reason needs a Chain plan");
    plan::validate_plan(plan);
    if (ctx.config.width < 1) throw std::invalid_argument("beam width must be at least 1");

    const auto& ts = plan.triples;
    auto anchor = ground_anchor(ts.front().head, ctx.kg);
    std::vector<Partial> beam{{ReasoningChain{}, anchor}};
    json hops = json::array();

    for (std::size_t hop = 0; hop < ts.size(); ++hop) {
        const auto& dt = ts[hop];
        auto direction = dt.reversed ? Direction::AnchorIsTail : Direction::AnchorIsHead;
        std::vector<Partial> next;
        json items = json::array();

        for (std::size_t p = 0; p < beam.size(); ++p) {
            ctx.deadline.check("relation search");
            const auto& parent = beam[p];
            auto shown = dt;
            if (hop > 0) shown.head = plan::TripleTerm::bound(ctx.kg.display_label(parent.frontier));
            auto triple_text = shown.str();
            json item = {{"parent", p}, {"anchor", parent.frontier.str()}, {"triple", triple_text}};

            auto rels = direction == Direction::AnchorIsHead ? ctx.kg.head_relation_search(parent.frontier)
                                                             : ctx.kg.tail_relation_search(parent.frontier);
            auto capped = cap_candidates(std::move(rels.items), dt.relation, ctx.config.candidate_cap);
            item["relation_candidates"] = capped.size();
            if (capped.empty()) {
                items.push_back(std::move(item));
                continue;
            }
            auto rp = prune_relations(triple_text, capped, ctx, ctx.config.relation_keep);
            item["relations"] = relations_json(rp.relations);
            item["relation_fallback"] = rp.fallback;
            item["relation_call_id"] = rp.call_id ? json(*rp.call_id) : json(nullptr);

            auto cands = search_candidate_triples(parent.frontier, rp.relations, direction, triple_text, ctx, &item);
            item["candidates"] = scored_json(cands);
            if (cands.empty()) {
                items.push_back(std::move(item));
                continue;
            }
            auto tp = prune_triples(triple_text, std::move(cands), ctx, ctx.config.width);
            item["kept"] = scored_json(tp.triples);
            item["triple_fallback"] = tp.fallback;
            item["triple_call_id"] = tp.call_id ? json(*tp.call_id) : json(nullptr);
            items.push_back(std::move(item));

            for (const auto& step : tp.triples) {
                Partial child = parent;
                child.chain.steps.push_back(step);
                if (dt.tail.is_placeholder()) child.chain.bridge_bindings[dt.tail.str()] = step.reached;
                child.chain.cumulative_score *= step.score;
                child.frontier = step.reached;
                next.push_back(std::move(child));
            }
        }
        hops.push_back({{"hop", hop + 1}, {"items", std::move(items)}, {"survivors", next.size()}});
        if (next.empty()) {
            if (trace) (*trace)["hops"] = std::move(hops);
            throw DeadEnd(hop + 1);
        }
        beam = std::move(next);
    }

    std::vector<ReasoningChain> chains;
    for (auto& p : beam) chains.push_back(std::move(p.chain));
    std::stable_sort(chains.begin(), chains.end(), [](const auto& a, const auto& b) {
        if (a.cumulative_score != b.cumulative_score) return a.cumulative_score > b.cumulative_score;
        return a.bridges() < b.bridges();
    });
    if (trace) {
        (*trace)["hops"] = std::move(hops);
        json cs = json::array();
        for (const auto& c : chains) cs.push_back(to_json(c));
        (*trace)["chains"] = std::move(cs);
    }
    return chains;
}

std::string render_chain(const ReasoningChain& chain) {
    std::vector<std::string> parts;
    for (const auto& s : chain.steps) {
        for (const auto& t : s.shown_triples()) parts.push_back("{" + t.str() + "}");
    }
    return text::join(parts, ", ");
}

ChainSelection select_best_chain(const std::string& question, const std::vector<ReasoningChain>& chains,
                                 ReasonContext& ctx) {
    if (chains.empty()) throw NoCandidates("no chains to select from");
    ChainSelection out;
    if (chains.size() == 1) return out;

    std::string listing;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        listing += "\nchain " + std::to_string(i + 1) + ": " + render_chain(chains[i]);
    }
    auto c = ask(ctx, prompts::TemplateId::ChainSelect, {{"chains", listing}, {"question", question}});
    out.call_id = c.call_id;

    static const std::regex re(R"(chain\s*(\d{1,4}))", std::regex::icase);
    for (std::sregex_iterator it(c.text.begin(), c.text.end(), re), end; it != end; ++it) {
        auto n = std::stoul((*it)[1].str());
        if (n >= 1 && n <= chains.size()) {
            out.index = n - 1;
            return out;
        }
    }
    out.fallback = true;  // chains arrive best-first, so index 0 is the top cumulative score
    return out;
}

// ---------------------------------------------------------------------------
// Parallel branches

std::vector<ReasoningTripleSet> parallel_reason(const plan::DecompositionPlan& plan, ReasonContext& ctx,
                                                json* trace) {
    if (plan.qtype != plan::QuestionType::Parallel) throw std::invalid_argument("parallel_reason needs a Parallel plan");
    plan::validate_plan(plan);

    auto run_branch = [&ctx](std::size_t index, const plan::DecompositionTriple& dt) {
        std::pair<ReasoningTripleSet, json> out;
        auto& set = out.first;
        auto& tr = out.second;
        set.branch_index = index;
        auto triple_text = dt.str();
        tr = {{"branch", index}, {"triple", triple_text}};

        std::optional<Direction> direction;
        const plan::TripleTerm* known = nullptr;
        if (!dt.head.is_placeholder() && dt.tail.is_placeholder()) {
            direction = Direction::AnchorIsHead;
            known = &dt.head;
        } else if (dt.head.is_placeholder() && !dt.tail.is_placeholder()) {
            direction = Direction::AnchorIsTail;
            known = &dt.tail;
        }
        if (!direction) {
            set.skipped = true;
            tr["skipped"] = true;
            return out;
        }

        kg::EntityId anchor;
        try {
            anchor = ground_anchor(*known, ctx.kg);
        } catch (const EntityNotFound& e) {
            set.error = std::string(e.kind());
            tr["error"] = set.error;
            return out;
        }
        tr["anchor"] = anchor.str();

        auto rels = *direction == Direction::AnchorIsHead ? ctx.kg.head_relation_search(anchor)
                                                          : ctx.kg.tail_relation_search(anchor);
        auto capped = cap_candidates(std::move(rels.items), dt.relation, ctx.config.candidate_cap);
        tr["relation_candidates"] = capped.size();
        if (capped.empty()) return out;
        auto rp = prune_relations(triple_text, capped, ctx, ctx.config.relation_keep);
        tr["relations"] = relations_json(rp.relations);
        tr["relation_fallback"] = rp.fallback;
        tr["relation_call_id"] = rp.call_id ? json(*rp.call_id) : json(nullptr);

        set.triples = search_candidate_triples(anchor, rp.relations, *direction, triple_text, ctx, &tr);
        tr["kept"] = scored_json(set.triples);
        return out;
    };

    std::vector<std::future<std::pair<ReasoningTripleSet, json>>> futures;
    for (std::size_t i = 0; i < plan.triples.size(); ++i) {
        futures.push_back(std::async(std::launch::async, run_branch, i, std::cref(plan.triples[i])));
    }
    // Collect in plan order; every future is drained before rethrowing.
    std::vector<ReasoningTripleSet> sets;
    json branches = json::array();
    std::exception_ptr first_error;
    for (auto& f : futures) {
        try {
            auto [set, tr] = f.get();
            sets.push_back(std::move(set));
            branches.push_back(std::move(tr));
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    if (trace) (*trace)["branches"] = std::move(branches);
    return sets;
}

// ---------------------------------------------------------------------------

json to_json(const ScoredTriple& t) {
    json j = {{"head", t.triple.head.str()},
              {"relation", t.triple.relation.str()},
              {"tail", t.triple.tail.str()},
              {"text", t.prompt_text()},
              {"reached", t.reached.str()},
              {"score", t.score}};
    if (t.expansion) {
        j["expansion"] = {{"head", t.expansion->head.str()},
                          {"relation", t.expansion->relation.str()},
                          {"tail", t.expansion->tail.str()}};
    }
    return j;
}

json to_json(const ReasoningChain& c) {
    json steps = json::array();
    for (const auto& s : c.steps) steps.push_back(to_json(s));
    json bindings = json::object();
    for (const auto& [k, v] : c.bridge_bindings) bindings[k] = v.str();
    return {{"steps", steps}, {"bridge_bindings", bindings}, {"cumulative_score", c.cumulative_score}};
}

json to_json(const ReasoningTripleSet& s) {
    json triples = json::array();
    for (const auto& t : s.triples) triples.push_back(to_json(t));
    json j = {{"branch", s.branch_index}, {"triples", triples}, {"skipped", s.skipped}};
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

}  // namespace pdrr::reason
