#include "pdrr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pdrr/config.hpp"
#include "pdrr/error.hpp"
#include "pdrr/eval.hpp"
#include "pdrr/kg_store.hpp"
#include "pdrr/llm_gateway.hpp"
#include "pdrr/pipeline.hpp"
#include "pdrr/prompts.hpp"

namespace pdrr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void setup_logging(const std::string& level) {
    auto logger = spdlog::get("pdrr");
    if (!logger) {
        logger = spdlog::stderr_color_mt("pdrr");
        spdlog::set_default_logger(logger);
    }
    spdlog::set_level(spdlog::level::from_str(level));
}

// Everything a command needs, built from the resolved configuration.
struct Env {
    config::RunConfig cfg;
    std::unique_ptr<llm::LlmBackend> llm;
    std::unique_ptr<llm::ResponseCache> cache;
    std::unique_ptr<kg::KgBackend> kg;
    prompts::TemplateSet templates;
};

std::unique_ptr<llm::ResponseCache> open_cache(const std::string& path) {
    if (path.empty()) return std::make_unique<llm::ResponseCache>();
    auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    return std::make_unique<llm::ResponseCache>(path);
}

std::unique_ptr<kg::KgBackend> open_kg(const config::RunConfig& cfg) {
    if (cfg.kg.empty()) return nullptr;
    if (cfg.kg_is_remote()) {
        kg::RemoteConfig rc;
        rc.endpoint = cfg.kg;
        rc.timeout = cfg.kg_timeout;
        rc.result_cap = cfg.result_cap;
        return std::make_unique<kg::RemoteKg>(rc);
    }
    if (!fs::exists(cfg.kg)) throw ConfigError("kg: no such file " + cfg.kg);
    auto graph = std::make_shared<const kg::KnowledgeGraph>(kg::load_graph_file(cfg.kg));
    return std::make_unique<kg::LocalKg>(graph, cfg.result_cap);
}

// Setup failures are configuration errors (exit 2).
Env build_env(const config::RunConfig& cfg, bool need_llm, bool need_kg) {
    Env env{cfg, nullptr, nullptr, nullptr, prompts::TemplateSet::builtin()};
    try {
        if (need_llm) {
            if (cfg.llm == config::LlmKind::Scripted) {
                env.llm = std::make_unique<llm::ScriptedBackend>(llm::ScriptedBackend::from_file(cfg.script));
            } else {
                llm::HttpChatConfig hc;
                hc.endpoint = cfg.llm_endpoint;
                hc.model = cfg.llm_model;
                hc.api_key_env = cfg.api_key_env;
                env.llm = std::make_unique<llm::HttpChatBackend>(hc);
            }
        }
        env.cache = open_cache(cfg.cache);
        if (need_kg) {
            if (cfg.kg.empty()) throw ConfigError("kg: no graph file or endpoint given");
            env.kg = open_kg(cfg);
        } else if (cfg.pipeline.method == Method::Pdrr || !cfg.kg.empty()) {
            env.kg = open_kg(cfg);
        }
        if (!cfg.templates.empty()) env.templates = prompts::TemplateSet::from_directory(cfg.templates);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return env;
}

std::string error_line(const std::exception& e) {
    if (auto pe = dynamic_cast<const Error*>(&e)) return std::string(pe->kind()) + ": " + pe->what();
    return std::string("InternalError: ") + e.what();
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

int cmd_ask(const std::string& question, Env& env, std::ostream& out, std::ostream& err) {
    llm::LlmClient client(*env.llm, env.cache.get());
    Backends b{env.kg.get(), client, env.templates};
    auto trace_path = fs::path(env.cfg.trace_dir) / ("ask-" + llm::sha256_hex(question).substr(0, 12) + ".json");
    json partial;
    try {
        auto res = run_question(question, std::nullopt, env.cfg.pipeline, b, &partial);
        write_json(trace_path, res.trace);
        out << res.answer.final_answer << "\n";
        err << "trace: " << trace_path.string() << "\n";
        spdlog::info("llm backend calls {}, cache hits {}", client.backend_calls(), client.cache_hits());
        return kExitOk;
    } catch (const ConfigError& e) {
        err << error_line(e) << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        partial["error"] = error_line(e);
        write_json(trace_path, partial);
        err << error_line(e) << "\n";
        err << "trace: " << trace_path.string() << "\n";
        return kExitPipeline;
    }
}

int cmd_eval(const std::string& dataset_path, const std::string& out_dir, Env& env, std::ostream& out,
             std::ostream& err) {
    std::vector<eval::DatasetRecord> dataset;
    try {
        dataset = eval::load_dataset_file(dataset_path, env.cfg.dataset_format);
    } catch (const std::exception& e) {
        err << error_line(e) << "\n";
        return kExitPipeline;
    }
    if (dataset.empty()) {
        err << "FormatError: dataset " << dataset_path << " has no records\n";
        return kExitPipeline;
    }
    auto digest = eval::config_digest(config::digest_fields(env.cfg, env.llm->id(), env.llm->model()));
    eval::EvalOptions opts;
    opts.workers = env.cfg.workers;
    opts.trace_dir = (fs::path(out_dir) / "traces").string();
    auto result = eval::evaluate(dataset, env.cfg.pipeline, env.kg.get(), *env.llm, env.cache.get(), env.templates,
                                 digest, opts);
    auto table = eval::render_table(result.report);
    write_json(fs::path(out_dir) / "report.json", eval::to_json(result.report));
    std::ofstream(fs::path(out_dir) / "report.txt", std::ios::binary) << table;
    out << table;
    err << "report: " << (fs::path(out_dir) / "report.json").string() << "\n";
    err << "llm backend calls: " << result.backend_calls << ", requests: " << result.report.llm_requests << "\n";
    return kExitOk;
}

int cmd_kg(const std::string& sub, const std::vector<std::string>& args, bool incoming, Env& env,
           std::ostream& out, std::ostream& err) {
    auto& g = *env.kg;
    try {
        if (sub == "match") {
            auto r = g.entity_match(args.at(0));
            for (const auto& m : r.items) out << m.id.str() << "\t" << m.label << "\n";
            if (r.truncated) err << "(truncated)\n";
        } else if (sub == "relations") {
            kg::EntityId id(args.at(0));
            auto r = incoming ? g.tail_relation_search(id) : g.head_relation_search(id);
            for (const auto& rel : r.items) out << rel.str() << "\n";
            if (r.truncated) err << "(truncated)\n";
        } else {
            kg::EntityId id(args.at(0));
            kg::Relation rel(args.at(1));
            auto r = incoming ? g.head_entity_search(id, rel) : g.tail_entity_search(id, rel);
            for (const auto& e : r.items) out << e.str() << "\t" << g.display_label(e) << "\n";
            if (r.truncated) err << "(truncated)\n";
        }
    } catch (const std::invalid_argument& e) {
        err << "InvalidArgument: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::exception& e) {
        err << error_line(e) << "\n";
        return kExitPipeline;
    }
    return kExitOk;
}

int cmd_cache(const std::string& sub, Env& env, std::ostream& out) {
    auto& c = *env.cache;
    if (sub == "stats") {
        out << "path\t" << (c.path().empty() ? "(memory)" : c.path()) << "\n";
        out << "entries\t" << c.size() << "\n";
        out << "skipped_lines\t" << c.skipped_lines() << "\n";
    } else {
        auto n = c.size();
        c.clear();
        out << "cleared\t" << n << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::function<const char*(const char*)>& getenv_fn) {
    auto getenv = getenv_fn ? getenv_fn : [](const char* k) -> const char* { return std::getenv(k); };

    CLI::App app{"Training-free question answering over knowledge graphs", "pdrr"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    app.add_option("--config", config_file, "flat key = value configuration file (or PDRR_CONFIG)");
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_opts;
    for (const auto& k : config::keys()) {
        auto key = std::string(k.name);
        std::string help = std::string(k.help) + " [" + config::env_name(k.name) + "]";
        flag_opts[key] = app.add_option("--" + config::flag_name(k.name), flag_values[key], help);
    }

    std::string question;
    auto* ask = app.add_subcommand("ask", "answer one question");
    ask->add_option("question", question, "the question")->required();

    std::string dataset, out_dir = "pdrr-eval";
    auto* ev = app.add_subcommand("eval", "evaluate a dataset and write a report");
    ev->add_option("dataset", dataset, "dataset file (JSONL or JSON)")->required();
    ev->add_option("--out", out_dir, "report directory")->capture_default_str();

    auto* kgc = app.add_subcommand("kg", "inspect the knowledge graph");
    kgc->require_subcommand(1);
    std::vector<std::string> kg_args;
    bool incoming = false;
    auto* kg_match = kgc->add_subcommand("match", "entities whose label matches text");
    kg_match->add_option("text", kg_args, "label text")->required()->expected(1);
    auto* kg_rel = kgc->add_subcommand("relations", "relations around an entity");
    kg_rel->add_option("entity", kg_args, "entity id")->required()->expected(1);
    kg_rel->add_flag("--incoming", incoming, "relations pointing at the entity");
    auto* kg_nb = kgc->add_subcommand("neighbors", "entities one relation away");
    kg_nb->add_option("args", kg_args, "entity id and relation")->required()->expected(2);
    kg_nb->add_flag("--incoming", incoming, "follow the relation backwards");

    auto* cache = app.add_subcommand("cache", "inspect or clear the response cache");
    cache->require_subcommand(1);
    auto* cache_stats = cache->add_subcommand("stats", "entry counts");
    cache->add_subcommand("clear", "drop every cached response");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    config::RunConfig cfg;
    try {
        config::Settings settings;
        if (config_file.empty()) {
            if (const char* c = getenv("PDRR_CONFIG")) config_file = c;
        }
        if (!config_file.empty()) settings.apply_file(config_file);
        settings.apply_env(getenv);
        for (const auto& [key, opt] : flag_opts) {
            if (opt->count() > 0) settings.set(key, flag_values[key], "flag");
        }
        // Inspection commands work without a model or a pdrr-capable setup.
        if (!ask->parsed() && !ev->parsed()) {
            if (settings.source("method") == "default") settings.set("method", "io", "default");
            if (settings.get("llm") == "scripted" && settings.get("script").empty()) settings.set("llm", "http", "default");
        }
        cfg = config::resolve(settings);
        setup_logging(cfg.log_level);
    } catch (const ConfigError& e) {
        err << error_line(e) << "\n";
        return kExitConfig;
    }

    Env env;
    try {
        bool need_llm = ask->parsed() || ev->parsed();
        env = build_env(cfg, need_llm, kgc->parsed());
    } catch (const ConfigError& e) {
        err << error_line(e) << "\n";
        return kExitConfig;
    }

    if (ask->parsed()) return cmd_ask(question, env, out, err);
    if (ev->parsed()) return cmd_eval(dataset, out_dir, env, out, err);
    if (kgc->parsed()) {
        std::string sub = kg_match->parsed() ? "match" : kg_rel->parsed() ? "relations" : "neighbors";
        return cmd_kg(sub, kg_args, incoming, env, out, err);
    }
    return cmd_cache(cache_stats->parsed() ? "stats" : "clear", env, out);
}

}  // namespace pdrr::cli
