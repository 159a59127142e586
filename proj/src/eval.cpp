#include "pdrr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "pdrr/error.hpp"
#include "pdrr/text.hpp"

namespace pdrr::eval {

using nlohmann::json;

std::optional<DatasetFormat> dataset_format_from_string(std::string_view s) {
    auto l = text::to_lower(text::trim(s));
    if (l == "auto") return DatasetFormat::Auto;
    if (l == "cwq") return DatasetFormat::Cwq;
    if (l == "webqsp") return DatasetFormat::WebQsp;
    if (l == "generic" || l == "generic-jsonl" || l == "jsonl") return DatasetFormat::Generic;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string str_field(const json& j, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (j.contains(k) && j[k].is_string()) return j[k].get<std::string>();
        if (j.contains(k) && j[k].is_number_integer()) return std::to_string(j[k].get<long long>());
    }
    return {};
}

void push_aliases(std::vector<std::vector<std::string>>& gold, std::vector<std::string> aliases) {
    std::vector<std::string> clean;
    for (auto& a : aliases) {
        auto t = text::trim(a);
        if (!t.empty() && std::find(clean.begin(), clean.end(), t) == clean.end()) clean.push_back(std::move(t));
    }
    if (!clean.empty() && std::find(gold.begin(), gold.end(), clean) == gold.end()) gold.push_back(std::move(clean));
}

DatasetFormat detect(const json& j) {
    if (j.contains("compositionality_type") || j.contains("ID")) return DatasetFormat::Cwq;
    if (j.contains("QuestionId") || j.contains("Parses")) return DatasetFormat::WebQsp;
    return DatasetFormat::Generic;
}

DatasetRecord parse_record(const json& j, DatasetFormat format) {
    if (!j.is_object()) throw std::runtime_error("record is not an object");
    if (format == DatasetFormat::Auto) format = detect(j);
    DatasetRecord r;
    switch (format) {
        case DatasetFormat::Cwq: {
            r.id = str_field(j, {"ID", "id"});
            r.question = str_field(j, {"question", "machine_question"});
            const json* answers = nullptr;
            if (j.contains("answers")) answers = &j["answers"];
            else if (j.contains("answer")) answers = &j["answer"];
            if (answers && answers->is_array()) {
                for (const auto& a : *answers) {
                    std::vector<std::string> aliases;
                    if (a.is_string()) {
                        aliases.push_back(a.get<std::string>());
                    } else if (a.is_object()) {
                        if (a.contains("answer") && a["answer"].is_string()) aliases.push_back(a["answer"]);
                        if (a.contains("aliases") && a["aliases"].is_array()) {
                            for (const auto& al : a["aliases"]) {
                                if (al.is_string()) aliases.push_back(al.get<std::string>());
                            }
                        }
                    }
                    push_aliases(r.gold_answers, std::move(aliases));
                }
            }
            auto label = text::to_lower(str_field(j, {"compositionality_type"}));
            if (std::find(std::begin(kQuestionTypes), std::end(kQuestionTypes), label) != std::end(kQuestionTypes)) {
                r.qtype_label = label;
            }
            break;
        }
        case DatasetFormat::WebQsp: {
            r.id = str_field(j, {"QuestionId", "id"});
            r.question = str_field(j, {"RawQuestion", "ProcessedQuestion", "question"});
            if (j.contains("Parses") && j["Parses"].is_array()) {
                for (const auto& p : j["Parses"]) {
                    if (!p.contains("Answers") || !p["Answers"].is_array()) continue;
                    for (const auto& a : p["Answers"]) {
                        std::vector<std::string> aliases;
                        if (a.contains("EntityName") && a["EntityName"].is_string()) aliases.push_back(a["EntityName"]);
                        if (aliases.empty() && a.contains("AnswerArgument") && a["AnswerArgument"].is_string()) {
                            aliases.push_back(a["AnswerArgument"]);
                        }
                        push_aliases(r.gold_answers, std::move(aliases));
                    }
                }
            }
            break;
        }
        case DatasetFormat::Generic:
        case DatasetFormat::Auto: {
            r.id = str_field(j, {"id"});
            r.question = str_field(j, {"question"});
            if (j.contains("answers") && j["answers"].is_array()) {
                for (const auto& a : j["answers"]) {
                    if (a.is_string()) {
                        push_aliases(r.gold_answers, {a.get<std::string>()});
                    } else if (a.is_array()) {
                        std::vector<std::string> aliases;
                        for (const auto& al : a) {
                            if (al.is_string()) aliases.push_back(al.get<std::string>());
                        }
                        push_aliases(r.gold_answers, std::move(aliases));
                    }
                }
            }
            auto label = text::to_lower(str_field(j, {"qtype", "compositionality_type"}));
            if (!label.empty()) {
                if (std::find(std::begin(kQuestionTypes), std::end(kQuestionTypes), label) == std::end(kQuestionTypes)) {
                    throw std::runtime_error("unknown qtype '" + label + "'");
                }
                r.qtype_label = label;
            }
            break;
        }
    }
    if (r.id.empty()) throw std::runtime_error("missing id");
    if (text::trim(r.question).empty()) throw std::runtime_error("missing question");
    if (r.gold_answers.empty()) throw std::runtime_error("missing answers");
    return r;
}

}  // namespace

std::vector<DatasetRecord> load_dataset(std::istream& in, DatasetFormat format) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<DatasetRecord> out;

    auto whole = json::parse(content, nullptr, false);
    const json* items = nullptr;
    if (!whole.is_discarded()) {
        if (whole.is_array()) items = &whole;
        else if (whole.is_object() && whole.contains("Questions") && whole["Questions"].is_array()) items = &whole["Questions"];
    }
    if (items) {
        for (std::size_t i = 0; i < items->size(); ++i) {
            try {
                out.push_back(parse_record((*items)[i], format));
            } catch (const std::exception& e) {
                throw FormatError("record " + std::to_string(i + 1) + ": " + e.what());
            }
        }
        return out;
    }

    std::istringstream lines(content);
    std::string line;
    for (std::size_t n = 1; std::getline(lines, line); ++n) {
        if (text::trim(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FormatError("line " + std::to_string(n) + ": invalid JSON");
        try {
            out.push_back(parse_record(j, format));
        } catch (const std::exception& e) {
            throw FormatError("line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<DatasetRecord> load_dataset_file(const std::string& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read dataset " + path);
    return load_dataset(in, format);
}

// ---------------------------------------------------------------------------
// Scoring

std::string normalize_answer(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (c == '-' || c == '_' || c == '/') {
            out += ' ';
        } else if (c < 0x80 && std::ispunct(c)) {
            continue;
        } else {
            out += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
        }
    }
    return text::collapse_whitespace(out);
}

bool hits_at_1(const std::vector<std::string>& predicted, const std::vector<std::vector<std::string>>& gold) {
    if (predicted.empty()) return false;
    auto p = normalize_answer(predicted.front());
    if (p.empty()) return false;
    auto padded_p = " " + p + " ";
    for (const auto& aliases : gold) {
        for (const auto& a : aliases) {
            auto g = normalize_answer(a);
            if (g.empty()) continue;
            auto padded_g = " " + g + " ";
            if (padded_p.find(padded_g) != std::string::npos || padded_g.find(padded_p) != std::string::npos) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const RunRecord& r) {
    return {{"id", r.id},
            {"question", r.question},
            {"qtype_label", r.qtype_label ? json(*r.qtype_label) : json(nullptr)},
            {"predicted_qtype", r.predicted_qtype ? json(*r.predicted_qtype) : json(nullptr)},
            {"final", r.final_answer},
            {"ranked_answers", r.ranked},
            {"hit", r.hit},
            {"fallback_used", r.fallback_used},
            {"error_class", r.error_class.empty() ? json(nullptr) : json(r.error_class)},
            {"error_message", r.error_message.empty() ? json(nullptr) : json(r.error_message)},
            {"wall_ms", r.wall_ms},
            {"llm_calls", r.llm_calls},
            {"backend_calls", r.backend_calls},
            {"cache_hits", r.cache_hits},
            {"tokens", r.tokens},
            {"trace", r.trace}};
}

namespace {

std::string pct(const TypeBucket& b) {
    if (b.count == 0) return "-";
    return fmt::format("{:.1f}", 100.0 * static_cast<double>(b.hits) / static_cast<double>(b.count));
}

std::vector<std::string> column_keys(const EvalReport& r) {
    std::vector<std::string> keys(std::begin(kQuestionTypes), std::end(kQuestionTypes));
    if (auto it = r.buckets.find(std::string(kUnlabeled)); it != r.buckets.end() && it->second.count) {
        keys.emplace_back(kUnlabeled);
    }
    return keys;
}

TypeBucket bucket(const EvalReport& r, const std::string& key) {
    auto it = r.buckets.find(key);
    return it == r.buckets.end() ? TypeBucket{} : it->second;
}

}  // namespace

json to_json(const EvalReport& r) {
    json per_type = json::object();
    for (const auto& k : column_keys(r)) {
        auto b = bucket(r, k);
        per_type[k] = {{"count", b.count},
                       {"hits", b.hits},
                       {"hits_at_1", b.count ? json(static_cast<double>(b.hits) / static_cast<double>(b.count))
                                             : json(nullptr)}};
    }
    return {{"method", r.method},
            {"type_source", r.type_source},
            {"rendering", r.rendering},
            {"beam_width", r.beam_width},
            {"config_digest", r.config_digest},
            {"total", r.total},
            {"hits", r.hits},
            {"hits_at_1", r.overall()},
            {"per_type", per_type},
            {"errors", r.errors},
            {"llm_requests", r.llm_requests},
            {"answer_rule", "final answer split on \", \"; Hits@1 scores the first part"}};
}

std::string render_table(const EvalReport& r) {
    std::vector<std::string> heads{"All"};
    std::vector<TypeBucket> cells{{r.total, r.hits}};
    for (const auto& k : column_keys(r)) {
        auto h = k;
        h[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(h[0])));
        heads.push_back(h);
        cells.push_back(bucket(r, k));
    }
    std::ostringstream os;
    os << fmt::format("method={} type_source={} rendering={} width={} digest={}\n", r.method, r.type_source,
                      r.rendering, r.beam_width, r.config_digest);
    os << fmt::format("{:<8}", "");
    for (const auto& h : heads) os << fmt::format("{:>13}", h);
    os << "\n" << fmt::format("{:<8}", "Hits@1");
    for (const auto& c : cells) os << fmt::format("{:>13}", pct(c));
    os << "\n" << fmt::format("{:<8}", "Count");
    for (const auto& c : cells) os << fmt::format("{:>13}", c.count);
    os << "\n";
    return os.str();
}

std::string config_digest(const json& config) { return llm::sha256_hex(config.dump()).substr(0, 16); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::string file_stem(const std::string& id) {
    std::string out;
    for (unsigned char c : id) out += (std::isalnum(c) || c == '-' || c == '_' || c == '.') ? static_cast<char>(c) : '_';
    return out.empty() ? "record" : out;
}

RunRecord run_one(const DatasetRecord& rec, const PipelineConfig& config, const kg::KgBackend* kg,
                  llm::LlmBackend& backend, llm::ResponseCache* cache, const prompts::TemplateSet& templates,
                  const llm::RetryPolicy& retry) {
    RunRecord out;
    out.id = rec.id;
    out.question = rec.question;
    out.qtype_label = rec.qtype_label;

    llm::LlmClient client(backend, cache, retry);
    Backends b{kg, client, templates};
    auto start = std::chrono::steady_clock::now();
    json partial;
    try {
        auto res = run_question(rec.question, rec.qtype_label, config, b, &partial);
        if (res.qtype) out.predicted_qtype = std::string(plan::to_string(*res.qtype));
        out.final_answer = res.answer.final_answer;
        out.ranked = res.answer.ranked;
        out.fallback_used = res.answer.fallback_used;
        out.hit = hits_at_1(out.ranked, rec.gold_answers);
        out.trace = std::move(res.trace);
    } catch (const Error& e) {
        out.error_class = std::string(e.kind());
        out.error_message = e.what();
        out.trace = std::move(partial);
    } catch (const std::exception& e) {
        out.error_class = "InternalError";
        out.error_message = e.what();
        out.trace = std::move(partial);
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (config.timeout.count() > 0 && out.error_class.empty() &&
        out.wall_ms > static_cast<double>(config.timeout.count())) {
        out.error_class = "Timeout";
        out.error_message = "record exceeded its time budget";
        out.hit = false;
    }
    out.backend_calls = client.backend_calls();
    out.cache_hits = client.cache_hits();
    out.llm_calls = out.backend_calls + out.cache_hits;
    out.tokens = client.tokens_used();
    return out;
}

}  // namespace

EvalResult evaluate(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                    const kg::KgBackend* kg, llm::LlmBackend& backend, llm::ResponseCache* cache,
                    const prompts::TemplateSet& templates, const std::string& digest, const EvalOptions& options) {
    if (dataset.empty()) throw FormatError("dataset is empty");
    EvalResult result;
    result.records.resize(dataset.size());

    if (options.trace_dir) std::filesystem::create_directories(*options.trace_dir);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < dataset.size();) {
            result.records[i] = run_one(dataset[i], config, kg, backend, cache, templates, options.retry);
            if (options.trace_dir) {
                std::ofstream f(std::filesystem::path(*options.trace_dir) / (file_stem(dataset[i].id) + ".json"));
                f << to_json(result.records[i]).dump(2) << "\n";
            }
        }
    };
    auto n = std::clamp<std::size_t>(options.workers, 1, dataset.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    auto& rep = result.report;
    rep.method = std::string(to_string(config.method));
    rep.type_source = std::string(to_string(config.type_source));
    rep.rendering = std::string(answer::to_string(config.rendering));
    rep.beam_width = config.beam.width;
    rep.config_digest = digest;
    for (const auto& k : kQuestionTypes) rep.buckets[std::string(k)];
    for (const auto& r : result.records) {
        auto& b = rep.buckets[r.qtype_label ? *r.qtype_label : std::string(kUnlabeled)];
        ++b.count;
        ++rep.total;
        rep.llm_requests += r.llm_calls;
        result.backend_calls += r.backend_calls;
        if (r.hit) {
            ++b.hits;
            ++rep.hits;
        }
        if (!r.error_class.empty()) ++rep.errors[r.error_class];
    }
    return result;
}

}  // namespace pdrr::eval
