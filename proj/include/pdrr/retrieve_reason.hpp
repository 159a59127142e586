#pragma once
// Grounding decomposition triples against the graph: relation search and
// prune, triple search and prune, beam search over chains, and independent
// branch retrieval for parallel plans.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdrr/deadline.hpp"
#include "pdrr/kg_store.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/plan.hpp"
#include "pdrr/prompts.hpp"

namespace pdrr::reason {

/// A triple as shown to the model: labels, or UnName_Entity for unnamed nodes.
struct LabeledTriple {
    std::string head;
    std::string relation;
    std::string tail;

    std::string str() const { return head + ", " + relation + ", " + tail; }
    friend auto operator<=>(const LabeledTriple&, const LabeledTriple&) = default;
};

struct ScoredRelation {
    kg::Relation relation;
    double score = 0.0;

    friend bool operator==(const ScoredRelation&, const ScoredRelation&) = default;
};

/// A candidate step. `expansion` holds the second triple when the first one
/// reaches an unnamed compound-value node; both share that node.
struct ScoredTriple {
    kg::Triple triple;
    std::optional<kg::Triple> expansion;
    kg::EntityId reached;           // the entity bound to the open side
    LabeledTriple shown;
    std::optional<LabeledTriple> expansion_shown;
    double score = 0.0;

    // "h, r, UnName_Entity; UnName_Entity, r2, t" for expanded candidates.
    std::string prompt_text() const;
    std::vector<kg::Triple> kg_triples() const;
    std::vector<LabeledTriple> shown_triples() const;
    friend bool operator==(const ScoredTriple&, const ScoredTriple&) = default;
};

struct ReasoningChain {
    std::vector<ScoredTriple> steps;
    std::map<std::string, kg::EntityId> bridge_bindings;  // "name#index" -> entity
    double cumulative_score = 1.0;

    std::vector<kg::EntityId> bridges() const;  // reached entity per step
    friend bool operator==(const ReasoningChain&, const ReasoningChain&) = default;
};

struct ReasoningTripleSet {
    std::size_t branch_index = 0;
    std::vector<ScoredTriple> triples;
    bool skipped = false;         // no single bound side; passed to answering as-is
    std::string error;            // error class when grounding failed

    friend bool operator==(const ReasoningTripleSet&, const ReasoningTripleSet&) = default;
};

struct BeamConfig {
    std::size_t width = 2;
    std::size_t relation_keep = 5;
    std::size_t candidate_cap = 60;
};

enum class Direction { AnchorIsHead, AnchorIsTail };

struct ReasonContext {
    const kg::KgBackend& kg;
    llm::LlmClient& llm;
    const prompts::TemplateSet& templates;
    BeamConfig config{};
    double temperature = llm::kDefaultTemperature;
    int max_tokens = llm::kIntermediateMaxTokens;
    Deadline deadline{};
};

struct RelationPruneResult {
    std::vector<ScoredRelation> relations;  // sorted (score desc, name asc), sums to 1
    bool fallback = false;                  // unparseable reply, uniform scores used
    std::optional<std::string> call_id;
};

struct TriplePruneResult {
    std::vector<ScoredTriple> triples;  // sorted (score desc, head asc, tail asc)
    bool fallback = false;              // unparseable reply, relation scores kept
    std::optional<std::string> call_id;
};

/// Parses `{relation (Score: x)}` items; exposed for fuzzing. Unmentioned
/// candidates score 0, zeros are dropped, the top `keep` are renormalized.
/// Uniform 1/n over the candidates when nothing usable is found.
RelationPruneResult score_relations(std::string_view response, const std::vector<kg::Relation>& candidates,
                                    std::size_t keep);

/// Parses `{triple text (Score: x)}` items against candidate display texts.
TriplePruneResult score_triples(std::string_view response, std::vector<ScoredTriple> candidates,
                                std::size_t k);

/// Keeps the `cap` relations with the highest token overlap with `phrase`
/// (ties by name); returns the input sorted by name when within the cap.
std::vector<kg::Relation> cap_candidates(std::vector<kg::Relation> relations, std::string_view phrase,
                                         std::size_t cap);

/// First hit of entity_match for the bound term; throws EntityNotFound.
kg::EntityId ground_anchor(const plan::TripleTerm& term, const kg::KgBackend& kg);

/// `triple_text` is the decomposition triple as shown in prompts.
RelationPruneResult prune_relations(const std::string& triple_text, std::vector<kg::Relation> candidates,
                                    ReasonContext& ctx, std::size_t keep);

std::vector<ScoredTriple> search_candidate_triples(const kg::EntityId& anchor,
                                                   const std::vector<ScoredRelation>& relations,
                                                   Direction direction, const std::string& triple_text,
                                                   ReasonContext& ctx, nlohmann::json* trace = nullptr);

TriplePruneResult prune_triples(const std::string& triple_text, std::vector<ScoredTriple> candidates,
                                ReasonContext& ctx, std::size_t k);

/// Completed chains sorted by (cumulative score desc, bridge ids asc).
/// Throws EntityNotFound for the anchor and DeadEnd(hop) when a hop empties the beam.
std::vector<ReasoningChain> chain_reason(const plan::DecompositionPlan& plan, ReasonContext& ctx,
                                         nlohmann::json* trace = nullptr);

/// "{h, r, t}, {h, r, t}" with compound-value steps written as two triples.
std::string render_chain(const ReasoningChain& chain);

struct ChainSelection {
    std::size_t index = 0;
    bool fallback = false;  // reply named no valid chain
    std::optional<std::string> call_id;
};

ChainSelection select_best_chain(const std::string& question, const std::vector<ReasoningChain>& chains,
                                 ReasonContext& ctx);

/// One set per plan triple, in plan order. Branches run concurrently.
std::vector<ReasoningTripleSet> parallel_reason(const plan::DecompositionPlan& plan, ReasonContext& ctx,
                                                nlohmann::json* trace = nullptr);

nlohmann::json to_json(const ScoredTriple& t);
nlohmann::json to_json(const ReasoningChain& c);
nlohmann::json to_json(const ReasoningTripleSet& s);

}  // namespace pdrr::reason
