#pragma once
// Knowledge-graph storage and retrieval.
//
// KnowledgeGraph is an immutable, fully indexed triple set built once from a
// TSV or N-Triples file. KgBackend is the retrieval contract used by the
// reasoning stages; LocalKg serves a KnowledgeGraph from memory and RemoteKg
// issues the equivalent SPARQL queries against a Freebase-style endpoint.

#include <atomic>
#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pdrr::kg {

inline constexpr std::string_view kUnnamedEntity = "UnName_Entity";
inline constexpr std::string_view kFreebaseNamespace = "http://rdf.freebase.com/ns/";
inline constexpr std::size_t kDefaultResultCap = 2000;

/// Opaque entity identifier (`m.0abc` on Freebase, any token locally).
/// Throws std::invalid_argument when empty or containing whitespace.
class EntityId {
public:
    EntityId() = default;
    explicit EntityId(std::string id);

    const std::string& str() const noexcept { return id_; }
    bool empty() const noexcept { return id_.empty(); }

    friend auto operator<=>(const EntityId&, const EntityId&) = default;

private:
    std::string id_;
};

/// Dotted relation path, e.g. `music.concert_tour.artist`.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::string name);

    const std::string& str() const noexcept { return name_; }

    friend auto operator<=>(const Relation&, const Relation&) = default;

private:
    std::string name_;
};

struct Triple {
    EntityId head;
    Relation relation;
    EntityId tail;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct EntityLabel {
    EntityId entity;
    std::string label;
    std::string language = "en";

    friend auto operator<=>(const EntityLabel&, const EntityLabel&) = default;
};

struct EntityMatch {
    EntityId id;
    std::string label;

    friend bool operator==(const EntityMatch&, const EntityMatch&) = default;
};

/// A capped retrieval result. Items are sorted; `truncated` is set when the
/// backend dropped entries beyond its result cap.
template <class T>
struct Retrieved {
    std::vector<T> items;
    bool truncated = false;
};

enum class GraphFormat { Tsv, NTriples };

// Entity-match ordering: label length ascending, then id, then label.
bool entity_match_less(const EntityMatch& a, const EntityMatch& b);

// The local fuzzy rule: every query token occurs as a whole token of the label.
bool label_matches(std::string_view label, const std::vector<std::string>& query_tokens);

class KnowledgeGraph {
public:
    class Builder {
    public:
        void add(Triple t) { triples_.push_back(std::move(t)); }
        void add_label(EntityLabel l) { labels_.push_back(std::move(l)); }
        void set_lines_read(std::size_t n) { lines_ = n; }
        KnowledgeGraph build() &&;

    private:
        std::vector<Triple> triples_;
        std::vector<EntityLabel> labels_;
        std::size_t lines_ = 0;
    };

    KnowledgeGraph() = default;

    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const std::vector<EntityLabel>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return triples_.size(); }
    std::size_t lines_read() const noexcept { return lines_; }

    bool contains(const Triple& t) const;
    std::optional<std::string> label(const EntityId& id) const;

    std::vector<EntityMatch> entity_match(std::string_view query) const;
    std::vector<Relation> head_relations(const EntityId& head) const;
    std::vector<Relation> tail_relations(const EntityId& tail) const;
    std::vector<EntityId> tails(const EntityId& head, const Relation& r) const;
    std::vector<EntityId> heads(const EntityId& tail, const Relation& r) const;

    // Every index entry points at exactly one stored triple/label and every
    // stored triple/label is reachable from each index.
    bool index_consistent() const;

private:
    using Postings = std::vector<std::uint32_t>;

    std::vector<Triple> triples_;
    std::vector<EntityLabel> labels_;
    std::size_t lines_ = 0;

    std::unordered_map<std::string, Postings> by_head_;
    std::unordered_map<std::string, Postings> by_tail_;
    std::unordered_map<std::string, Postings> by_head_rel_;
    std::unordered_map<std::string, Postings> by_tail_rel_;
    std::unordered_map<std::string, Postings> label_by_entity_;
    std::unordered_map<std::string, Postings> label_tokens_;
};

/// Parse a graph from `in`. TSV lines are `head<TAB>relation<TAB>tail`, with
/// `#label<TAB>entity<TAB>text` label lines and other `#` lines as comments.
/// Throws ParseError(line, reason).
KnowledgeGraph load_graph(std::istream& in, GraphFormat format);
KnowledgeGraph load_graph_file(const std::string& path);

/// Retrieval contract shared by the local and remote backends.
class KgBackend {
public:
    explicit KgBackend(std::size_t result_cap = kDefaultResultCap) : cap_(result_cap) {}
    virtual ~KgBackend() = default;
    KgBackend(const KgBackend&) = delete;
    KgBackend& operator=(const KgBackend&) = delete;

    /// Throws EmptyQuery when the trimmed query is empty.
    virtual Retrieved<EntityMatch> entity_match(std::string_view query) const = 0;
    virtual Retrieved<Relation> head_relation_search(const EntityId& entity) const = 0;
    virtual Retrieved<Relation> tail_relation_search(const EntityId& entity) const = 0;
    virtual Retrieved<EntityId> tail_entity_search(const EntityId& head, const Relation& r) const = 0;
    virtual Retrieved<EntityId> head_entity_search(const EntityId& tail, const Relation& r) const = 0;
    virtual std::optional<std::string> label(const EntityId& entity) const = 0;

    // Label, or UnName_Entity for compound-value nodes.
    std::string display_label(const EntityId& entity) const;

    std::size_t result_cap() const noexcept { return cap_; }
    std::size_t calls() const noexcept { return calls_.load(); }

protected:
    void count_call() const { calls_.fetch_add(1, std::memory_order_relaxed); }

    template <class T>
    Retrieved<T> capped(std::vector<T> items) const {
        Retrieved<T> r;
        if (items.size() > cap_) {
            items.resize(cap_);
            r.truncated = true;
        }
        r.items = std::move(items);
        return r;
    }

private:
    std::size_t cap_;
    mutable std::atomic<std::size_t> calls_{0};
};

class LocalKg final : public KgBackend {
public:
    explicit LocalKg(std::shared_ptr<const KnowledgeGraph> graph,
                     std::size_t result_cap = kDefaultResultCap);

    Retrieved<EntityMatch> entity_match(std::string_view query) const override;
    Retrieved<Relation> head_relation_search(const EntityId& entity) const override;
    Retrieved<Relation> tail_relation_search(const EntityId& entity) const override;
    Retrieved<EntityId> tail_entity_search(const EntityId& head, const Relation& r) const override;
    Retrieved<EntityId> head_entity_search(const EntityId& tail, const Relation& r) const override;
    std::optional<std::string> label(const EntityId& entity) const override;

    const KnowledgeGraph& graph() const noexcept { return *graph_; }

private:
    std::shared_ptr<const KnowledgeGraph> graph_;
};

struct RemoteConfig {
    std::string endpoint;  // e.g. http://localhost:8890/sparql
    std::chrono::milliseconds timeout{10000};
    std::string namespace_iri{kFreebaseNamespace};
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::size_t result_cap = kDefaultResultCap;
};

/// SPARQL-protocol client (HTTP GET, JSON results). Transport failures and
/// 5xx responses are retried with exponential backoff; after the budget the
/// call throws RemoteUnavailable.
class RemoteKg final : public KgBackend {
public:
    explicit RemoteKg(RemoteConfig config);

    Retrieved<EntityMatch> entity_match(std::string_view query) const override;
    Retrieved<Relation> head_relation_search(const EntityId& entity) const override;
    Retrieved<Relation> tail_relation_search(const EntityId& entity) const override;
    Retrieved<EntityId> tail_entity_search(const EntityId& head, const Relation& r) const override;
    Retrieved<EntityId> head_entity_search(const EntityId& tail, const Relation& r) const override;
    std::optional<std::string> label(const EntityId& entity) const override;

    const RemoteConfig& config() const noexcept { return config_; }

private:
    std::string run_query(const std::string& sparql) const;

    RemoteConfig config_;
    std::string scheme_host_port_;
    std::string path_;
};

}  // namespace pdrr::kg
