#include <gtest/gtest.h>

#include <thread>

#include "pdrr/error.hpp"
#include "pdrr/pipeline.hpp"
#include "test_support.hpp"

using namespace pdrr;

namespace {

struct Rig {
    std::shared_ptr<const kg::KnowledgeGraph> graph;
    kg::LocalKg kg;
    llm::ScriptedBackend backend;
    llm::LlmClient llm;
    prompts::TemplateSet templates = prompts::TemplateSet::builtin();
    Backends b;

    Rig(const std::string& graph_file, llm::ScriptedBackend s)
        : graph(fx::fixture_graph(graph_file)), kg(graph), backend(std::move(s)), llm(backend, nullptr),
          b{&kg, llm, templates} {}
};

llm::ScriptedBackend script(const std::string& file) {
    return llm::ScriptedBackend::from_file(fx::test_path("fixtures/" + file));
}

const std::string kFig2Q = "Where did the 'Country Nation World Tour' concert artist go to college?";
const std::string kMorrisQ = "William Morris is religions head in which region that is part of the United Kingdom?";

}  // namespace

TEST(Pipeline, ChainAndParallelFixtures) {
    PipelineConfig cfg;
    Rig fig2("fig2.tsv", script("fig2_script.jsonl"));
    auto r = run_question(kFig2Q, std::nullopt, cfg, fig2.b);
    EXPECT_EQ(r.answer.final_answer, "Belmont University");
    EXPECT_EQ(r.qtype, plan::QuestionType::Chain);
    EXPECT_TRUE(r.fallback.empty());
    EXPECT_EQ(r.trace["type"]["source"], "predicted");

    Rig chain("morris.tsv", script("morris_chain_script.jsonl"));
    Rig par("morris.tsv", script("morris_parallel_script.jsonl"));
    auto c = run_question(kMorrisQ, std::nullopt, cfg, chain.b);
    auto p = run_question(kMorrisQ, std::nullopt, cfg, par.b);
    EXPECT_EQ(c.qtype, plan::QuestionType::Chain);
    EXPECT_EQ(p.qtype, plan::QuestionType::Parallel);
    EXPECT_EQ(c.answer.final_answer, "Wales");
    EXPECT_EQ(p.answer.final_answer, "Wales");
}

TEST(Pipeline, GoldTypesSkipPrediction) {
    PipelineConfig cfg;
    cfg.type_source = TypeSource::Gold;
    // the parallel script predicts Parallel, so a Chain result shows the label won
    auto s = script("morris_parallel_script.jsonl");
    s.add(fx::reply("answer_chain", {}, "{Wales}"));
    Rig run("morris.tsv", std::move(s));
    auto r = run_question(kMorrisQ, std::string("composition"), cfg, run.b);
    EXPECT_EQ(r.trace["type"]["source"], "gold");
    EXPECT_EQ(r.qtype, plan::QuestionType::Chain);

    // unlabeled records fall back to prediction
    auto u = run_question(kMorrisQ, std::nullopt, cfg, run.b);
    EXPECT_EQ(u.trace["type"]["source"], "predicted");
    EXPECT_EQ(u.qtype, plan::QuestionType::Parallel);
    auto odd = run_question(kMorrisQ, std::string("mystery"), cfg, run.b);
    EXPECT_EQ(odd.trace["type"]["source"], "predicted");

    EXPECT_EQ(gold_question_type("conjunction"), plan::QuestionType::Parallel);
    EXPECT_EQ(gold_question_type("superlative"), plan::QuestionType::Parallel);
    EXPECT_EQ(gold_question_type("Composition"), plan::QuestionType::Chain);
}

TEST(Pipeline, UngroundedChainFallsBackToPlanOnly) {
    llm::ScriptedBackend s({fx::reply("question_type", {}, "{Chain Structure}"),
                            fx::reply("decompose", {}, R"({"head": "Atlantis Expo", "relation": "held in", "tail": "city#1"})"),
                            fx::reply("answer_pdr_chain", {}, "{Paris}")});
    Rig run("fig2.tsv", std::move(s));
    auto r = run_question("Where was the Atlantis Expo held?", std::nullopt, {}, run.b);
    EXPECT_EQ(r.fallback, "pdr");
    EXPECT_TRUE(r.answer.fallback_used);
    EXPECT_EQ(r.answer.mode, "pdr-chain");
    EXPECT_EQ(r.answer.final_answer, "Paris");
    EXPECT_EQ(r.trace["fallback_reason"]["error"], "EntityNotFound");
}

TEST(Pipeline, AllEmptyParallelFallsBack) {
    llm::ScriptedBackend s(
        {fx::reply("question_type", {}, "{Parallel Structure}"),
         fx::reply("decompose", {}, R"({"head": "country#1", "relation": "borders", "tail": "Atlantis"})"),
         fx::reply("answer_pdr_parallel", {}, "{Nowhere}")});
    Rig run("nijmegen.tsv", std::move(s));
    auto r = run_question("Which country borders Atlantis?", std::nullopt, {}, run.b);
    EXPECT_EQ(r.fallback, "pdr");
    EXPECT_EQ(r.trace["fallback_reason"]["error"], "NoCandidates");
}

TEST(Pipeline, BaselinesNeedNoGraph) {
    llm::ScriptedBackend s({fx::reply("answer_io", {}, "{Wales}"), fx::reply("answer_cot", {}, "so {Wales}")});
    llm::LlmClient client(s, nullptr);
    auto templates = prompts::TemplateSet::builtin();
    Backends b{nullptr, client, templates};
    PipelineConfig cfg;
    cfg.method = Method::Io;
    EXPECT_EQ(run_question("q?", std::nullopt, cfg, b).answer.mode, "io");
    cfg.method = Method::Cot;
    EXPECT_EQ(run_question("q?", std::nullopt, cfg, b).answer.final_answer, "Wales");
}

TEST(Pipeline, PdrrWithoutGraphIsConfigError) {
    Rig run("fig2.tsv", script("fig2_script.jsonl"));
    Backends nokg{nullptr, run.llm, run.templates};
    EXPECT_THROW(run_question(kFig2Q, std::nullopt, {}, nokg), ConfigError);
}

TEST(Pipeline, TimeoutLeavesPartialTrace) {
    fx::FnBackend slow([](const llm::CompletionRequest& r) -> llm::BackendReply {
        std::this_thread::sleep_for(std::chrono::milliseconds(40));
        if (r.template_name == "question_type") return {"{Chain Structure}", {}};
        return {R"({"head": "Brad Paisley", "relation": "went to", "tail": "college#1"})", {}};
    });
    llm::LlmClient client(slow, nullptr);
    auto templates = prompts::TemplateSet::builtin();
    kg::LocalKg kg(fx::fixture_graph("fig2.tsv"));
    Backends b{&kg, client, templates};
    PipelineConfig cfg;
    cfg.timeout = std::chrono::milliseconds(60);
    nlohmann::json partial;
    EXPECT_THROW(run_question("Where did Brad Paisley study?", std::nullopt, cfg, b, &partial), Timeout);
    EXPECT_TRUE(partial.contains("type"));
    EXPECT_FALSE(partial.contains("answer"));
}

TEST(Pipeline, EmptyQuestion) {
    Rig run("fig2.tsv", script("fig2_script.jsonl"));
    EXPECT_THROW(run_question("   ", std::nullopt, {}, run.b), std::invalid_argument);
}
