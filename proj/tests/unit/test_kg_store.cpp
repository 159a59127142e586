#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "pdrr/error.hpp"
#include "pdrr/kg_store.hpp"
#include "test_support.hpp"

using namespace pdrr;
using namespace pdrr::kg;

namespace {

// --- brute-force oracle: a plain list of triples and labels, scanned ---

struct ScanGraph {
    std::vector<std::array<std::string, 3>> triples;
    std::vector<std::pair<std::string, std::string>> labels;  // id, text
};

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> scan_tails(const ScanGraph& g, const std::string& h, const std::string& r) {
    std::set<std::string> s;
    for (auto& t : g.triples)
        if (t[0] == h && t[1] == r) s.insert(t[2]);
    return {s.begin(), s.end()};
}

std::vector<std::string> scan_heads(const ScanGraph& g, const std::string& t, const std::string& r) {
    std::set<std::string> s;
    for (auto& x : g.triples)
        if (x[2] == t && x[1] == r) s.insert(x[0]);
    return {s.begin(), s.end()};
}

std::vector<std::string> scan_rels(const ScanGraph& g, const std::string& e, bool as_head) {
    std::set<std::string> s;
    for (auto& x : g.triples)
        if ((as_head ? x[0] : x[2]) == e) s.insert(x[1]);
    return {s.begin(), s.end()};
}

std::vector<std::pair<std::string, std::string>> scan_match(const ScanGraph& g, const std::string& q) {
    auto qw = words(q);
    std::set<std::pair<std::string, std::string>> hits;
    if (qw.empty()) return {};
    for (auto& [id, text] : g.labels) {
        auto lw = words(text);
        bool all = true;
        for (auto& w : qw) all = all && std::find(lw.begin(), lw.end(), w) != lw.end();
        if (all) hits.insert({id, text});
    }
    std::vector<std::pair<std::string, std::string>> out(hits.begin(), hits.end());
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    return out;
}

template <class T>
std::vector<std::string> ids(const std::vector<T>& v) {
    std::vector<std::string> out;
    for (auto& x : v) out.push_back(x.str());
    return out;
}

const char* kVocab[] = {"river", "north", "saint", "grand", "lake", "city", "hall", "music", "park", "old"};

}  // namespace

TEST(KgOracle, RandomGraphsMatchLinearScan) {
    auto start = std::chrono::steady_clock::now();
    int queries = 0;
    for (unsigned seed = 1; seed <= 100; ++seed) {
        std::mt19937 rng(seed);
        auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
        int n_ent = 5 + pick(40), n_rel = 1 + pick(8), n_tri = pick(201);
        ScanGraph sg;
        std::ostringstream tsv;
        for (int i = 0; i < n_tri; ++i) {
            std::array<std::string, 3> t{"e" + std::to_string(pick(n_ent)), "r.x" + std::to_string(pick(n_rel)),
                                         "e" + std::to_string(pick(n_ent))};
            sg.triples.push_back(t);
            tsv << t[0] << '\t' << t[1] << '\t' << t[2] << '\n';
        }
        for (int e = 0; e < n_ent; ++e) {
            if (pick(4) == 0) continue;  // unlabeled node
            std::string text = kVocab[pick(10)];
            for (int k = pick(3); k > 0; --k) text += std::string(" ") + kVocab[pick(10)];
            sg.labels.push_back({"e" + std::to_string(e), text});
            tsv << "#label\te" << e << '\t' << text << '\n';
        }
        auto graph = std::make_shared<const KnowledgeGraph>(fx::graph_from(tsv.str()));
        ASSERT_TRUE(graph->index_consistent()) << "seed " << seed;
        LocalKg kg(graph);

        for (int q = 0; q < 10; ++q, ++queries) {
            // ids beyond n_ent exercise absent entities
            auto ent = "e" + std::to_string(pick(n_ent + 3));
            auto rel = "r.x" + std::to_string(pick(n_rel + 1));
            switch (q % 5) {
                case 0: {
                    std::string text = kVocab[pick(10)];
                    if (pick(2)) text += std::string(" ") + kVocab[pick(10)];
                    auto got = kg.entity_match(text).items;
                    auto want = scan_match(sg, text);
                    ASSERT_EQ(got.size(), want.size()) << "seed " << seed << " match " << text;
                    for (std::size_t i = 0; i < got.size(); ++i) {
                        EXPECT_EQ(got[i].id.str(), want[i].first);
                        EXPECT_EQ(got[i].label, want[i].second);
                    }
                    break;
                }
                case 1:
                    EXPECT_EQ(ids(kg.head_relation_search(EntityId(ent)).items), scan_rels(sg, ent, true));
                    break;
                case 2:
                    EXPECT_EQ(ids(kg.tail_relation_search(EntityId(ent)).items), scan_rels(sg, ent, false));
                    break;
                case 3:
                    EXPECT_EQ(ids(kg.tail_entity_search(EntityId(ent), Relation(rel)).items), scan_tails(sg, ent, rel));
                    break;
                case 4:
                    EXPECT_EQ(ids(kg.head_entity_search(EntityId(ent), Relation(rel)).items), scan_heads(sg, ent, rel));
                    break;
            }
        }
    }
    EXPECT_EQ(queries, 1000);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(30));
}

TEST(KgLoad, TsvLabelsAndDuplicates) {
    auto g = fx::graph_from(
        "# comment\n"
        "#label\tm.a\tAlpha City\n"
        "m.a\tloc.contains\tm.b\n"
        "m.a\tloc.contains\tm.b\n"
        "\n"
        "m.b\tloc.near\tm.c\r\n");
    EXPECT_EQ(g.size(), 2u);
    EXPECT_EQ(g.lines_read(), 6u);
    EXPECT_EQ(g.label(EntityId("m.a")), "Alpha City");
    EXPECT_FALSE(g.label(EntityId("m.b")).has_value());
    EXPECT_TRUE(g.contains({EntityId("m.b"), Relation("loc.near"), EntityId("m.c")}));
}

TEST(KgLoad, TsvErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& tsv) {
        try {
            fx::graph_from(tsv);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{999};
    };
    EXPECT_EQ(line_of("a\tr\tb\na\tr\n"), 2u);
    EXPECT_EQ(line_of("a\tr\tb\n\na b\tr\tc\n"), 3u);
    EXPECT_EQ(line_of("#label\tm.a\n"), 1u);
    EXPECT_EQ(line_of("#label\tm.a\t  \n"), 1u);
    EXPECT_EQ(line_of("a\t\tb\n"), 1u);
    EXPECT_EQ(line_of("a\tr\t\xff\xfe\n"), 1u);
}

TEST(KgLoad, NTriples) {
    std::istringstream in(
        "<http://rdf.freebase.com/ns/m.x> <http://rdf.freebase.com/ns/type.object.name> \"Caf\\u00e9 \\\"X\\\"\"@en .\n"
        "# comment\n"
        "<http://rdf.freebase.com/ns/m.x> <http://rdf.freebase.com/ns/loc.in> <http://rdf.freebase.com/ns/m.y> .\n");
    auto g = load_graph(in, GraphFormat::NTriples);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.label(EntityId("m.x")), "Caf\xc3\xa9 \"X\"");
    EXPECT_EQ(g.triples()[0].relation.str(), "loc.in");

    std::istringstream bad("<a> <b> \"lit\"@en .\n");
    EXPECT_THROW(load_graph(bad, GraphFormat::NTriples), ParseError);
    std::istringstream nodot("<a> <b> <c>\n");
    EXPECT_THROW(load_graph(nodot, GraphFormat::NTriples), ParseError);
}

TEST(KgLoad, MissingFile) {
    try {
        load_graph_file("/nonexistent/graph.tsv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 0u);
    }
}

TEST(KgBackend, CapsMarkTruncation) {
    std::ostringstream tsv;
    for (int i = 0; i < 7; ++i) tsv << "hub\tr.out\tn" << i << "\n";
    LocalKg kg(std::make_shared<const KnowledgeGraph>(fx::graph_from(tsv.str())), 5);
    auto r = kg.tail_entity_search(EntityId("hub"), Relation("r.out"));
    EXPECT_EQ(r.items.size(), 5u);
    EXPECT_TRUE(r.truncated);
    auto small = kg.head_relation_search(EntityId("hub"));
    EXPECT_FALSE(small.truncated);
    EXPECT_EQ(kg.calls(), 2u);
}

TEST(KgBackend, EmptyQueryAndUnnamed) {
    LocalKg kg(fx::fixture_graph("fig2.tsv"));
    EXPECT_THROW(kg.entity_match("   "), EmptyQuery);
    EXPECT_EQ(kg.display_label(EntityId("m.cvt_edu1")), "UnName_Entity");
    EXPECT_EQ(kg.display_label(EntityId("m.paisley")), "Brad Paisley");
    auto m = kg.entity_match("country nation world tour").items;
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].id.str(), "m.cnwt");  // shorter label first
}

TEST(KgBackend, EntityIdRejectsWhitespace) {
    EXPECT_THROW(EntityId("a b"), std::invalid_argument);
    EXPECT_THROW(EntityId(""), std::invalid_argument);
}

TEST(KgFixtures, SuiteGraphIsUnionOfParts) {
    auto suite = fx::fixture_graph("suite.tsv");
    auto a = fx::fixture_graph("fig2.tsv");
    auto b = fx::fixture_graph("nijmegen.tsv");
    std::set<Triple> want(a->triples().begin(), a->triples().end());
    want.insert(b->triples().begin(), b->triples().end());
    EXPECT_EQ(std::set<Triple>(suite->triples().begin(), suite->triples().end()), want);
    EXPECT_EQ(suite->labels().size(), a->labels().size() + b->labels().size());
}
