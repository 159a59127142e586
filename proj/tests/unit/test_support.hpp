#pragma once
// Shared helpers for the unit tests.

#include <atomic>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "pdrr/kg_store.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/prompts.hpp"

#ifndef PDRR_TEST_DIR
#error "PDRR_TEST_DIR must point at tests/"
#endif

namespace pdrr::fx {

inline std::string test_path(const std::string& rel) { return std::string(PDRR_TEST_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const kg::KnowledgeGraph> fixture_graph(const std::string& name) {
    return std::make_shared<const kg::KnowledgeGraph>(kg::load_graph_file(test_path("fixtures/" + name)));
}

inline kg::KnowledgeGraph graph_from(const std::string& tsv) {
    std::istringstream in(tsv);
    return kg::load_graph(in, kg::GraphFormat::Tsv);
}

// Backend that replays one function; counts calls.
template <class F>
class FnBackend final : public llm::LlmBackend {
public:
    explicit FnBackend(F f) : f_(std::move(f)) {}
    llm::BackendReply generate(const llm::CompletionRequest& r) override {
        ++calls;
        return f_(r);
    }
    std::string id() const override { return "fn"; }
    std::string model() const override { return "fn"; }
    std::atomic<int> calls{0};

private:
    F f_;
};

inline llm::ScriptedBackend::Entry reply(std::string tmpl, std::vector<std::string> contains, std::string response) {
    llm::ScriptedBackend::Entry e;
    e.template_name = std::move(tmpl);
    e.contains = std::move(contains);
    e.response = std::move(response);
    return e;
}

}  // namespace pdrr::fx
