#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pdrr/answer.hpp"
#include "pdrr/error.hpp"
#include "pdrr/eval.hpp"
#include "pdrr/text.hpp"
#include "test_support.hpp"

using namespace pdrr;
using namespace pdrr::eval;
namespace fs = std::filesystem;

namespace {

std::vector<DatasetRecord> load(const std::string& s, DatasetFormat f = DatasetFormat::Auto) {
    std::istringstream in(s);
    return load_dataset(in, f);
}

std::string format_error(const std::string& s) {
    try {
        load(s);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Dataset, CwqJsonl) {
    auto rs = load(
        R"({"ID": "c1", "question": "q1", "compositionality_type": "Conjunction", "answers": [{"answer": "Germany", "aliases": ["Deutschland", "Germany"]}]})"
        "\n\n"
        R"({"ID": "c2", "machine_question": "q2", "compositionality_type": "weird", "answers": [{"answer": "Wales"}]})" "\n");
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[0].qtype_label, "conjunction");
    EXPECT_EQ(rs[0].gold_answers, (std::vector<std::vector<std::string>>{{"Germany", "Deutschland"}}));
    EXPECT_EQ(rs[1].question, "q2");
    EXPECT_EQ(rs[1].qtype_label, std::nullopt);
    // a bare string answer is not accepted, blank lines still count
    EXPECT_NE(format_error("\n" R"({"ID": "c3", "question": "q", "answer": "Wales"})").find("line 2: missing answers"),
              std::string::npos);
}

TEST(Dataset, WebQspObject) {
    auto rs = load(R"({"Version": "1", "Questions": [
        {"QuestionId": "w1", "RawQuestion": "who?", "Parses": [
            {"Answers": [{"AnswerArgument": "m.1", "EntityName": "Wales"}, {"AnswerArgument": "1999", "EntityName": null}]},
            {"Answers": [{"AnswerArgument": "m.1", "EntityName": "Wales"}]}]}]})");
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].id, "w1");
    EXPECT_EQ(rs[0].gold_answers, (std::vector<std::vector<std::string>>{{"Wales"}, {"1999"}}));
    EXPECT_FALSE(rs[0].qtype_label);
}

TEST(Dataset, GenericArrayAndErrors) {
    auto rs = load(R"([{"id": "g1", "question": "q", "answers": ["A", ["B", "Bee"]], "qtype": "superlative"}])");
    EXPECT_EQ(rs[0].gold_answers.size(), 2u);
    EXPECT_EQ(rs[0].qtype_label, "superlative");

    EXPECT_NE(format_error(R"({"id": "g", "question": "q", "answers": ["A"]})" "\n{broken\n").find("line 2"),
              std::string::npos);
    EXPECT_NE(format_error(R"([{"id": "g", "question": "q", "answers": ["A"]}, {"id": "h", "question": "q"}])")
                  .find("record 2"),
              std::string::npos);
    EXPECT_NE(format_error(R"({"id": "g", "question": "q", "answers": ["A"], "qtype": "odd"})").find("unknown qtype"),
              std::string::npos);
    EXPECT_NE(format_error(R"({"id": "g", "question": " ", "answers": ["A"]})").find("missing question"),
              std::string::npos);
    EXPECT_THROW(load_dataset_file("/nonexistent.jsonl"), FormatError);
}

TEST(Dataset, FixtureSuites) {
    auto suite = load_dataset_file(fx::test_path("fixtures/suite_cwq.jsonl"));
    ASSERT_EQ(suite.size(), 4u);
    std::set<std::string> types;
    for (auto& r : suite) types.insert(*r.qtype_label);
    EXPECT_EQ(types.size(), 4u);
    EXPECT_EQ(load_dataset_file(fx::test_path("fixtures/beam_suite.jsonl")).size(), 10u);
}

TEST(Hits, Normalization) {
    EXPECT_EQ(normalize_answer("  St. Louis-Park_West/AC  "), "st louis park west ac");
    EXPECT_EQ(normalize_answer("O'Neil, \"Jr.\""), "oneil jr");
    EXPECT_EQ(normalize_answer("S\xc3\xa3o Tom\xc3\xa9"), "s\xc3\xa3o tom\xc3\xa9");
}

// Hand-labeled pairs in tests/data; the labels were written against the rule
// in the README, not produced by running the scorer.
TEST(Hits, HandLabeledTable) {
    std::ifstream in(fx::test_path("data/hits_table.tsv"));
    std::string line;
    int rows = 0, agree = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto f = text::split(line, "\t");
        ASSERT_EQ(f.size(), 3u) << line;
        std::vector<std::vector<std::string>> gold{text::split(f[1], "|")};
        bool want = f[2] == "1";
        bool got = hits_at_1(answer::split_ranked(f[0]), gold);
        ++rows;
        if (got == want) ++agree;
        EXPECT_EQ(got, want) << line;
    }
    EXPECT_EQ(rows, 20);
    EXPECT_EQ(agree, 20);
}

TEST(Hits, OnlyFirstRankedCounts) {
    EXPECT_FALSE(hits_at_1({"France", "Germany"}, {{"Germany"}}));
    EXPECT_TRUE(hits_at_1({"Germany", "France"}, {{"Germany"}}));
    EXPECT_FALSE(hits_at_1({}, {{"Germany"}}));
    EXPECT_TRUE(hits_at_1({"Wales"}, {{"England"}, {"Wales"}}));
}

namespace {

struct SuiteRun {
    std::shared_ptr<const kg::KnowledgeGraph> graph = fx::fixture_graph("suite.tsv");
    kg::LocalKg kg{graph};
    llm::ScriptedBackend backend = llm::ScriptedBackend::from_file(fx::test_path("fixtures/suite_script.jsonl"));
    prompts::TemplateSet templates = prompts::TemplateSet::builtin();
    std::vector<DatasetRecord> data = load_dataset_file(fx::test_path("fixtures/suite_cwq.jsonl"));
};

}  // namespace

TEST(Evaluate, SuiteScoresAndBuckets) {
    SuiteRun s;
    llm::ResponseCache cache;
    auto r = evaluate(s.data, {}, &s.kg, s.backend, &cache, s.templates, "d");
    EXPECT_EQ(r.report.total, 4u);
    EXPECT_EQ(r.report.hits, 4u);
    for (auto k : kQuestionTypes) EXPECT_EQ(r.report.buckets.at(std::string(k)).count, 1u);
    EXPECT_TRUE(r.records[2].fallback_used);  // comparative: one branch cannot be grounded
    EXPECT_EQ(r.records[0].id, "suite-composition");

    auto table = render_table(r.report);
    EXPECT_NE(table.find("method=pdrr"), std::string::npos);
    EXPECT_NE(table.find("Superlative"), std::string::npos);
    EXPECT_EQ(table.find("Unlabeled"), std::string::npos);
}

TEST(Evaluate, WorkersDoNotChangeReport) {
    SuiteRun s;
    EvalOptions one, four;
    four.workers = 4;
    auto a = evaluate(s.data, {}, &s.kg, s.backend, nullptr, s.templates, "d", one);
    auto b = evaluate(s.data, {}, &s.kg, s.backend, nullptr, s.templates, "d", four);
    EXPECT_EQ(to_json(a.report).dump(), to_json(b.report).dump());
}

TEST(Evaluate, FailuresBecomeMissesAndTracesAreWritten) {
    SuiteRun s;
    llm::ScriptedBackend empty;
    auto dir = fs::temp_directory_path() / "pdrr-eval-traces";
    fs::remove_all(dir);
    EvalOptions o;
    o.trace_dir = dir.string();
    auto r = evaluate(s.data, {}, &s.kg, empty, nullptr, s.templates, "d", o);
    EXPECT_EQ(r.report.hits, 0u);
    EXPECT_EQ(r.report.errors.at("ScriptMiss"), 4u);
    EXPECT_TRUE(fs::exists(dir / "suite-composition.json"));
    EXPECT_THROW(evaluate({}, {}, &s.kg, empty, nullptr, s.templates, "d"), FormatError);
    fs::remove_all(dir);
}

TEST(Evaluate, UnlabeledColumnAppears) {
    SuiteRun s;
    auto recs = s.data;
    recs[0].qtype_label.reset();
    auto r = evaluate(recs, {}, &s.kg, s.backend, nullptr, s.templates, "d");
    EXPECT_EQ(r.report.buckets.at("unlabeled").count, 1u);
    EXPECT_NE(render_table(r.report).find("Unlabeled"), std::string::npos);
}

TEST(Digest, StableAndSensitive) {
    nlohmann::json a = {{"width", 2}, {"method", "pdrr"}};
    nlohmann::json b = {{"method", "pdrr"}, {"width", 2}};
    EXPECT_EQ(config_digest(a), config_digest(b));
    EXPECT_EQ(config_digest(a).size(), 16u);
    b["width"] = 1;
    EXPECT_NE(config_digest(a), config_digest(b));
}
