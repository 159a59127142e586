#include "pdrr/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pdrr/error.hpp"
#include "pdrr/sparql.hpp"
#include "pdrr/text.hpp"

namespace pdrr::kg {

namespace {

bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
}

std::string pair_key(const std::string& a, const std::string& b) {
    std::string k;
    k.reserve(a.size() + b.size() + 1);
    k += a;
    k += '\x1f';
    k += b;
    return k;
}

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t n = 0;
        if (c < 0x80) n = 0;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2) n = 1;
        else if ((c & 0xF0) == 0xE0) n = 2;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4) n = 3;
        else return false;
        if (i + n >= s.size()) return false;
        for (std::size_t k = 1; k <= n; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        }
        i += n + 1;
    }
    return true;
}

}  // namespace

EntityId::EntityId(std::string id) : id_(std::move(id)) {
    if (id_.empty()) throw std::invalid_argument("entity id is empty");
    if (has_space(id_)) throw std::invalid_argument("entity id contains whitespace: " + id_);
}

Relation::Relation(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw std::invalid_argument("relation name is empty");
}

bool entity_match_less(const EntityMatch& a, const EntityMatch& b) {
    if (a.label.size() != b.label.size()) return a.label.size() < b.label.size();
    if (a.id != b.id) return a.id < b.id;
    return a.label < b.label;
}

bool label_matches(std::string_view label, const std::vector<std::string>& query_tokens) {
    if (query_tokens.empty()) return false;
    auto label_tokens = text::tokenize(label);
    std::sort(label_tokens.begin(), label_tokens.end());
    return std::all_of(query_tokens.begin(), query_tokens.end(), [&](const std::string& t) {
        return std::binary_search(label_tokens.begin(), label_tokens.end(), t);
    });
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

KnowledgeGraph KnowledgeGraph::Builder::build() && {
    KnowledgeGraph g;
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    g.triples_ = std::move(triples_);
    g.labels_ = std::move(labels_);
    g.lines_ = lines_;

    for (std::uint32_t i = 0; i < g.triples_.size(); ++i) {
        const auto& t = g.triples_[i];
        g.by_head_[t.head.str()].push_back(i);
        g.by_tail_[t.tail.str()].push_back(i);
        g.by_head_rel_[pair_key(t.head.str(), t.relation.str())].push_back(i);
        g.by_tail_rel_[pair_key(t.tail.str(), t.relation.str())].push_back(i);
    }
    for (std::uint32_t i = 0; i < g.labels_.size(); ++i) {
        const auto& l = g.labels_[i];
        g.label_by_entity_[l.entity.str()].push_back(i);
        auto toks = text::tokenize(l.label);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (auto& tok : toks) g.label_tokens_[tok].push_back(i);
    }
    return g;
}

bool KnowledgeGraph::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

std::optional<std::string> KnowledgeGraph::label(const EntityId& id) const {
    auto it = label_by_entity_.find(id.str());
    if (it == label_by_entity_.end()) return std::nullopt;
    const EntityLabel* first = nullptr;
    for (auto idx : it->second) {
        const auto& l = labels_[idx];
        if (l.language == "en") return l.label;
        if (!first) first = &l;
    }
    return first ? std::optional<std::string>(first->label) : std::nullopt;
}

std::vector<EntityMatch> KnowledgeGraph::entity_match(std::string_view query) const {
    auto tokens = text::tokenize(query);
    std::vector<EntityMatch> out;
    if (tokens.empty()) return out;

    // Start from the rarest token's postings.
    const Postings* smallest = nullptr;
    for (const auto& tok : tokens) {
        auto it = label_tokens_.find(tok);
        if (it == label_tokens_.end()) return out;
        if (!smallest || it->second.size() < smallest->size()) smallest = &it->second;
    }
    for (auto idx : *smallest) {
        const auto& l = labels_[idx];
        if (l.language != "en") continue;
        if (label_matches(l.label, tokens)) out.push_back({l.entity, l.label});
    }
    std::sort(out.begin(), out.end(), entity_match_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

template <class Map>
const std::vector<std::uint32_t>* find_postings(const Map& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<Relation> KnowledgeGraph::head_relations(const EntityId& head) const {
    std::set<Relation> rels;
    if (auto* p = find_postings(by_head_, head.str())) {
        for (auto i : *p) rels.insert(triples_[i].relation);
    }
    return {rels.begin(), rels.end()};
}

std::vector<Relation> KnowledgeGraph::tail_relations(const EntityId& tail) const {
    std::set<Relation> rels;
    if (auto* p = find_postings(by_tail_, tail.str())) {
        for (auto i : *p) rels.insert(triples_[i].relation);
    }
    return {rels.begin(), rels.end()};
}

std::vector<EntityId> KnowledgeGraph::tails(const EntityId& head, const Relation& r) const {
    std::vector<EntityId> out;
    if (auto* p = find_postings(by_head_rel_, pair_key(head.str(), r.str()))) {
        for (auto i : *p) out.push_back(triples_[i].tail);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<EntityId> KnowledgeGraph::heads(const EntityId& tail, const Relation& r) const {
    std::vector<EntityId> out;
    if (auto* p = find_postings(by_tail_rel_, pair_key(tail.str(), r.str()))) {
        for (auto i : *p) out.push_back(triples_[i].head);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool KnowledgeGraph::index_consistent() const {
    auto check = [&](const std::unordered_map<std::string, Postings>& index, std::size_t universe,
                     auto key_of) {
        std::vector<int> seen(universe, 0);
        std::size_t entries = 0;
        for (const auto& [key, postings] : index) {
            for (auto i : postings) {
                if (i >= universe || key_of(i) != key) return false;
                ++seen[i];
                ++entries;
            }
        }
        return entries == universe &&
               std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; });
    };
    auto n = triples_.size();
    bool ok = check(by_head_, n, [&](auto i) { return triples_[i].head.str(); }) &&
              check(by_tail_, n, [&](auto i) { return triples_[i].tail.str(); }) &&
              check(by_head_rel_, n,
                    [&](auto i) { return pair_key(triples_[i].head.str(), triples_[i].relation.str()); }) &&
              check(by_tail_rel_, n,
                    [&](auto i) { return pair_key(triples_[i].tail.str(), triples_[i].relation.str()); }) &&
              check(label_by_entity_, labels_.size(), [&](auto i) { return labels_[i].entity.str(); });
    if (!ok) return false;

    // Token index: each label appears once under each of its distinct tokens.
    std::size_t expected = 0;
    for (const auto& l : labels_) {
        auto toks = text::tokenize(l.label);
        std::sort(toks.begin(), toks.end());
        expected += static_cast<std::size_t>(std::unique(toks.begin(), toks.end()) - toks.begin());
    }
    std::size_t entries = 0;
    for (const auto& [tok, postings] : label_tokens_) {
        for (auto i : postings) {
            if (i >= labels_.size()) return false;
            auto toks = text::tokenize(labels_[i].label);
            if (std::find(toks.begin(), toks.end(), tok) == toks.end()) return false;
            ++entries;
        }
    }
    return entries == expected;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

void parse_tsv_line(const std::string& line, std::size_t lineno, KnowledgeGraph::Builder& b) {
    if (line.empty()) return;
    if (line.rfind("#label\t", 0) == 0) {
        auto fields = text::split(line, "\t");
        if (fields.size() != 3) throw ParseError(lineno, "label line needs 3 tab-separated fields");
        if (fields[1].empty() || has_space(fields[1]))
            throw ParseError(lineno, "malformed entity id in label line");
        auto label = text::trim(fields[2]);
        if (label.empty()) throw ParseError(lineno, "empty label");
        b.add_label({EntityId(fields[1]), std::move(label), "en"});
        return;
    }
    if (line[0] == '#') return;
    auto fields = text::split(line, "\t");
    if (fields.size() != 3) throw ParseError(lineno, "expected head<TAB>relation<TAB>tail");
    for (const auto& f : fields) {
        if (f.empty()) throw ParseError(lineno, "empty field");
    }
    if (has_space(fields[0]) || has_space(fields[2]))
        throw ParseError(lineno, "entity id contains whitespace");
    b.add({EntityId(fields[0]), Relation(fields[1]), EntityId(fields[2])});
}

// Minimal N-Triples reader: IRI subject/predicate, IRI object or a language
// tagged literal on type.object.name (or rdfs:label).
class NtLine {
public:
    NtLine(std::string_view s, std::size_t lineno) : s_(s), lineno_(lineno) {}

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    std::string iri() {
        skip_ws();
        if (peek() != '<') fail("expected IRI");
        auto end = s_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated IRI");
        std::string v(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        if (v.empty() || has_space(v)) fail("malformed IRI");
        return v;
    }

    std::pair<std::string, std::string> literal() {
        skip_ws();
        if (peek() != '"') fail("expected literal");
        ++pos_;
        std::string v;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated literal");
            char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                v.push_back(c);
                continue;
            }
            if (pos_ >= s_.size()) fail("dangling escape");
            char e = s_[pos_++];
            switch (e) {
                case 'n': v.push_back('\n'); break;
                case 't': v.push_back('\t'); break;
                case 'r': v.push_back('\r'); break;
                case '"': v.push_back('"'); break;
                case '\\': v.push_back('\\'); break;
                case 'u': {
                    if (pos_ + 4 > s_.size()) fail("short \\u escape");
                    unsigned cp = std::stoul(std::string(s_.substr(pos_, 4)), nullptr, 16);
                    pos_ += 4;
                    append_utf8(v, cp);
                    break;
                }
                default: fail("unknown escape");
            }
        }
        std::string lang;
        if (pos_ < s_.size() && s_[pos_] == '@') {
            auto start = ++pos_;
            while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '.') ++pos_;
            lang = std::string(s_.substr(start, pos_ - start));
        } else if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '^') {
            pos_ += 2;
            iri();
        }
        return {v, lang};
    }

    void expect_dot() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected terminating '.'");
        ++pos_;
        if (!at_end()) fail("trailing content after '.'");
    }

    [[noreturn]] void fail(const std::string& why) const { throw ParseError(lineno_, why); }

private:
    static void append_utf8(std::string& out, unsigned cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t lineno_;
};

std::string strip_namespace(std::string iri) {
    if (iri.rfind(kFreebaseNamespace, 0) == 0) iri.erase(0, kFreebaseNamespace.size());
    return iri;
}

bool is_name_predicate(const std::string& p) {
    return p == "type.object.name" || p == "http://www.w3.org/2000/01/rdf-schema#label";
}

void parse_nt_line(const std::string& line, std::size_t lineno, KnowledgeGraph::Builder& b) {
    NtLine nt(line, lineno);
    if (nt.at_end() || nt.peek() == '#') return;
    auto subject = strip_namespace(nt.iri());
    auto predicate = strip_namespace(nt.iri());
    if (nt.peek() == '"') {
        auto [value, lang] = nt.literal();
        nt.expect_dot();
        if (!is_name_predicate(predicate)) nt.fail("literal object on non-name predicate");
        auto label = text::trim(value);
        if (label.empty()) nt.fail("empty label");
        b.add_label({EntityId(subject), std::move(label), lang.empty() ? "en" : lang});
        return;
    }
    auto object = strip_namespace(nt.iri());
    nt.expect_dot();
    b.add({EntityId(subject), Relation(predicate), EntityId(object)});
}

}  // namespace

KnowledgeGraph load_graph(std::istream& in, GraphFormat format) {
    KnowledgeGraph::Builder b;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!valid_utf8(line)) throw ParseError(lineno, "invalid UTF-8");
        if (format == GraphFormat::Tsv) {
            parse_tsv_line(line, lineno, b);
        } else {
            parse_nt_line(line, lineno, b);
        }
    }
    b.set_lines_read(lineno);
    return std::move(b).build();
}

KnowledgeGraph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path);
    auto ends_with = [&](std::string_view suf) {
        return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
    };
    auto format = ends_with(".nt") ? GraphFormat::NTriples : GraphFormat::Tsv;
    return load_graph(in, format);
}

// ---------------------------------------------------------------------------
// Backends

std::string KgBackend::display_label(const EntityId& entity) const {
    auto l = label(entity);
    return l ? *l : std::string(kUnnamedEntity);
}

LocalKg::LocalKg(std::shared_ptr<const KnowledgeGraph> graph, std::size_t result_cap)
    : KgBackend(result_cap), graph_(std::move(graph)) {
    if (!graph_) throw std::invalid_argument("LocalKg needs a graph");
}

Retrieved<EntityMatch> LocalKg::entity_match(std::string_view query) const {
    count_call();
    if (text::trim(query).empty()) throw EmptyQuery("entity_match query is empty");
    return capped(graph_->entity_match(query));
}

Retrieved<Relation> LocalKg::head_relation_search(const EntityId& entity) const {
    count_call();
    return capped(graph_->head_relations(entity));
}

Retrieved<Relation> LocalKg::tail_relation_search(const EntityId& entity) const {
    count_call();
    return capped(graph_->tail_relations(entity));
}

Retrieved<EntityId> LocalKg::tail_entity_search(const EntityId& head, const Relation& r) const {
    count_call();
    return capped(graph_->tails(head, r));
}

Retrieved<EntityId> LocalKg::head_entity_search(const EntityId& tail, const Relation& r) const {
    count_call();
    return capped(graph_->heads(tail, r));
}

std::optional<std::string> LocalKg::label(const EntityId& entity) const {
    return graph_->label(entity);
}

// ---------------------------------------------------------------------------
// RemoteKg

namespace {

struct BindingValue {
    std::string type;
    std::string value;
    std::string lang;
};

std::vector<std::unordered_map<std::string, BindingValue>> parse_bindings(const std::string& body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("results") || !j["results"].contains("bindings")) {
        throw RemoteUnavailable("malformed SPARQL JSON response");
    }
    std::vector<std::unordered_map<std::string, BindingValue>> rows;
    for (const auto& row : j["results"]["bindings"]) {
        std::unordered_map<std::string, BindingValue> r;
        for (const auto& [var, cell] : row.items()) {
            BindingValue v;
            v.type = cell.value("type", "");
            v.value = cell.value("value", "");
            v.lang = cell.value("xml:lang", "");
            r.emplace(var, std::move(v));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::optional<std::string> ns_local(const BindingValue& v, const std::string& ns) {
    if (v.type != "uri") return std::nullopt;
    if (v.value.rfind(ns, 0) != 0) return std::nullopt;
    auto local = v.value.substr(ns.size());
    if (local.empty() || has_space(local)) return std::nullopt;
    return local;
}

}  // namespace

RemoteKg::RemoteKg(RemoteConfig config)
    : KgBackend(config.result_cap), config_(std::move(config)) {
    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme");
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = config_.endpoint;
        path_ = "/";
    } else {
        scheme_host_port_ = config_.endpoint.substr(0, path_start);
        path_ = config_.endpoint.substr(path_start);
    }
}

std::string RemoteKg::run_query(const std::string& sparql) const {
    count_call();
    auto backoff = config_.initial_backoff;
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < config_.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client cli(scheme_host_port_);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
        cli.set_connection_timeout(secs.count(), usecs.count());
        cli.set_read_timeout(secs.count(), usecs.count());
        httplib::Params params{{"query", sparql}, {"format", "application/sparql-results+json"}};
        httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
        auto res = cli.Get(path_, params, headers);
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw RemoteUnavailable("SPARQL endpoint rejected query: HTTP " + std::to_string(res->status));
        }
        return res->body;
    }
    throw RemoteUnavailable("SPARQL endpoint unavailable after " + std::to_string(config_.attempts) +
                            " attempts (" + last_error + ")");
}

Retrieved<EntityMatch> RemoteKg::entity_match(std::string_view query) const {
    auto q = text::trim(query);
    if (q.empty()) throw EmptyQuery("entity_match query is empty");
    SparqlBindings b;
    b.entity_string = q;
    auto rows = parse_bindings(run_query(render_sparql(Primitive::EntityMatch, b)));
    std::vector<EntityMatch> out;
    for (auto& row : rows) {
        auto e = row.find("entity");
        auto l = row.find("label");
        if (e == row.end() || l == row.end()) continue;
        auto id = ns_local(e->second, config_.namespace_iri);
        if (!id || l->second.value.empty()) continue;
        out.push_back({EntityId(*id), l->second.value});
    }
    std::sort(out.begin(), out.end(), entity_match_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return capped(std::move(out));
}

namespace {

template <class T, class Make>
std::vector<T> collect(const std::vector<std::unordered_map<std::string, BindingValue>>& rows,
                       const std::string& var, const std::string& ns, Make make) {
    std::set<T> uniq;
    for (const auto& row : rows) {
        auto it = row.find(var);
        if (it == row.end()) continue;
        if (auto local = ns_local(it->second, ns)) uniq.insert(make(*local));
    }
    return {uniq.begin(), uniq.end()};
}

}  // namespace

Retrieved<Relation> RemoteKg::head_relation_search(const EntityId& entity) const {
    SparqlBindings b;
    b.head = entity.str();
    auto rows = parse_bindings(run_query(render_sparql(Primitive::HeadRelationSearch, b)));
    return capped(collect<Relation>(rows, "relation", config_.namespace_iri,
                                    [](const std::string& s) { return Relation(s); }));
}

Retrieved<Relation> RemoteKg::tail_relation_search(const EntityId& entity) const {
    SparqlBindings b;
    b.tail = entity.str();
    auto rows = parse_bindings(run_query(render_sparql(Primitive::TailRelationSearch, b)));
    return capped(collect<Relation>(rows, "relation", config_.namespace_iri,
                                    [](const std::string& s) { return Relation(s); }));
}

Retrieved<EntityId> RemoteKg::tail_entity_search(const EntityId& head, const Relation& r) const {
    SparqlBindings b;
    b.head = head.str();
    b.relation = r.str();
    auto rows = parse_bindings(run_query(render_sparql(Primitive::TailEntitySearch, b)));
    return capped(collect<EntityId>(rows, "tailEntity", config_.namespace_iri,
                                    [](const std::string& s) { return EntityId(s); }));
}

Retrieved<EntityId> RemoteKg::head_entity_search(const EntityId& tail, const Relation& r) const {
    SparqlBindings b;
    b.tail = tail.str();
    b.relation = r.str();
    auto rows = parse_bindings(run_query(render_sparql(Primitive::HeadEntitySearch, b)));
    return capped(collect<EntityId>(rows, "headEntity", config_.namespace_iri,
                                    [](const std::string& s) { return EntityId(s); }));
}

std::optional<std::string> RemoteKg::label(const EntityId& entity) const {
    auto rows = parse_bindings(run_query(render_label_query(entity.str())));
    std::vector<std::string> labels;
    for (const auto& row : rows) {
        auto it = row.find("label");
        if (it != row.end() && !it->second.value.empty()) labels.push_back(it->second.value);
    }
    if (labels.empty()) return std::nullopt;
    return *std::min_element(labels.begin(), labels.end());
}

}  // namespace pdrr::kg
