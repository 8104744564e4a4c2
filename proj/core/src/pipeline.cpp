#include "faqir/pipeline.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "faqir/error.hpp"
#include "faqir/text.hpp"
#include "io_util.hpp"

namespace faqir::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    bm25.validate();
    fusion.validate();
    if (k_values.empty()) {
        throw ConfigError("k_values must not be empty");
    }
    for (const auto k : k_values) {
        if (k == 0) {
            throw ConfigError("every k in k_values must be positive");
        }
    }
    if (run_depth == 0) {
        throw ConfigError("run_depth must be positive");
    }
    if (std::find(kSystems.begin(), kSystems.end(), baseline_tag) == kSystems.end()) {
        throw ConfigError("baseline_tag '" + baseline_tag + "' names no system (expected bm25, dense or hybrid)");
    }
    if (paths.corpus.empty() || paths.queries.empty() || paths.qrels.empty() || paths.output_dir.empty()) {
        throw ConfigError("config needs corpus, queries, qrels and output_dir paths");
    }
    if (provider.kind == dense::ProviderKind::file && (paths.doc_vectors.empty() || paths.query_vectors.empty())) {
        throw ConfigError("provider kind 'file' needs doc_vectors and query_vectors paths");
    }
    if (provider.kind == dense::ProviderKind::remote && provider.endpoint.empty()) {
        throw ConfigError("provider kind 'remote' needs an endpoint");
    }
    if (provider.kind == dense::ProviderKind::mock && provider.dim < 8) {
        throw ConfigError("mock provider dim must be at least 8");
    }
}

// --- JSON config ----------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

fs::path resolve(const json& obj, const char* key, const fs::path& base) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return {};
    }
    fs::path p = it->get<std::string>();
    if (p.empty() || p.is_absolute() || base.empty()) {
        return p;
    }
    return base / p;
}

template <typename T>
void read_opt(const json& obj, const char* key, T& target) {
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        target = it->get<T>();
    }
}

}  // namespace

ExperimentConfig config_from_json(std::string_view json_text, const fs::path& base_dir) {
    ExperimentConfig config;
    try {
        const json root = json::parse(json_text);
        reject_unknown(root,
                       {"paths", "bm25", "fusion", "k_values", "provider", "baseline_tag", "seed", "run_depth",
                        "wilcoxon_exact_cutoff"},
                       "config");
        const json& paths = root.at("paths");
        reject_unknown(paths, {"corpus", "queries", "qrels", "doc_vectors", "query_vectors", "output_dir"}, "paths");
        config.paths.corpus = resolve(paths, "corpus", base_dir);
        config.paths.queries = resolve(paths, "queries", base_dir);
        config.paths.qrels = resolve(paths, "qrels", base_dir);
        config.paths.doc_vectors = resolve(paths, "doc_vectors", base_dir);
        config.paths.query_vectors = resolve(paths, "query_vectors", base_dir);
        config.paths.output_dir = resolve(paths, "output_dir", base_dir);

        if (const auto it = root.find("bm25"); it != root.end()) {
            reject_unknown(*it, {"k1", "b"}, "bm25");
            read_opt(*it, "k1", config.bm25.k1);
            read_opt(*it, "b", config.bm25.b);
        }
        if (const auto it = root.find("fusion"); it != root.end()) {
            reject_unknown(*it, {"method", "alpha", "rrf_k", "depth"}, "fusion");
            std::string method(hybrid::to_string(config.fusion.method));
            read_opt(*it, "method", method);
            config.fusion.method = hybrid::fusion_method_from_string(method);
            read_opt(*it, "alpha", config.fusion.alpha);
            read_opt(*it, "rrf_k", config.fusion.rrf_k);
            read_opt(*it, "depth", config.fusion.depth);
        }
        read_opt(root, "k_values", config.k_values);
        if (const auto it = root.find("provider"); it != root.end()) {
            reject_unknown(*it,
                           {"kind", "dim", "model_name", "query_prefix", "passage_prefix", "endpoint", "synonyms"},
                           "provider");
            std::string kind(dense::to_string(config.provider.kind));
            read_opt(*it, "kind", kind);
            config.provider.kind = dense::provider_kind_from_string(kind);
            read_opt(*it, "dim", config.provider.dim);
            if (const auto m = it->find("model_name"); m != it->end() && !m->is_null()) {
                config.provider.model_name = m->get<std::string>();
            }
            read_opt(*it, "query_prefix", config.provider.query_prefix);
            read_opt(*it, "passage_prefix", config.provider.passage_prefix);
            read_opt(*it, "endpoint", config.provider.endpoint);
            config.provider.synonyms = resolve(*it, "synonyms", base_dir);
        }
        read_opt(root, "baseline_tag", config.baseline_tag);
        read_opt(root, "seed", config.seed);
        read_opt(root, "run_depth", config.run_depth);
        read_opt(root, "wilcoxon_exact_cutoff", config.wilcoxon.exact_cutoff);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid experiment config: ") + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = detail::read_text_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return config_from_json(text, path.parent_path());
}

std::string config_to_json(const ExperimentConfig& config) {
    const json root = {
        {"paths",
         {{"corpus", config.paths.corpus.string()},
          {"queries", config.paths.queries.string()},
          {"qrels", config.paths.qrels.string()},
          {"doc_vectors", config.paths.doc_vectors.string()},
          {"query_vectors", config.paths.query_vectors.string()},
          {"output_dir", config.paths.output_dir.string()}}},
        {"bm25", {{"k1", config.bm25.k1}, {"b", config.bm25.b}}},
        {"fusion",
         {{"method", std::string(hybrid::to_string(config.fusion.method))},
          {"alpha", config.fusion.alpha},
          {"rrf_k", config.fusion.rrf_k},
          {"depth", config.fusion.depth}}},
        {"k_values", config.k_values},
        {"provider",
         {{"kind", std::string(dense::to_string(config.provider.kind))},
          {"dim", config.provider.dim},
          {"model_name", config.provider.model_name ? json(*config.provider.model_name) : json(nullptr)},
          {"query_prefix", config.provider.query_prefix},
          {"passage_prefix", config.provider.passage_prefix},
          {"endpoint", config.provider.endpoint},
          {"synonyms", config.provider.synonyms.string()}}},
        {"baseline_tag", config.baseline_tag},
        {"seed", config.seed},
        {"run_depth", config.run_depth},
        {"wilcoxon_exact_cutoff", config.wilcoxon.exact_cutoff}};
    return root.dump(2) + "\n";
}

// --- runs -----------------------------------------------------------------------

eval::Run lexical_run(const lexical::InvertedIndex& index, const QuerySet& queries, std::size_t depth) {
    eval::Run run;
    run.tag = "bm25";
    for (const auto& q : queries) {
        run.rankings[q.id] = index.search(q.text, depth);
    }
    return run;
}

eval::Run dense_run(const dense::VectorStore& docs, const dense::VectorStore& query_vectors, std::size_t depth) {
    eval::Run run;
    run.tag = "dense";
    for (std::size_t i = 0; i < query_vectors.size(); ++i) {
        const auto row = query_vectors.row(i);
        const dense::EmbeddingVector q(std::vector<float>(row.begin(), row.end()));
        run.rankings[query_vectors.ids()[i]] = dense::dense_search(docs, q, depth);
    }
    return run;
}

namespace {

// Embeds every record that has at least one token; token-less records have
// no embedding direction and are left out of the store.
template <typename Records>
dense::VectorStore embed_records(const dense::EmbeddingProvider& provider, const Records& records,
                                 dense::TextKind kind) {
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    for (const auto& r : records) {
        if (!text::analyze(r.text).empty()) {
            ids.push_back(r.id);
            texts.push_back(r.text);
        }
    }
    return dense::embed_to_store(provider, ids, texts, kind);
}

class StageTracker {
public:
    explicit StageTracker(fs::path dir) : dir_(std::move(dir)) {}

    template <typename Fn>
    auto run(const std::string& stage, Fn fn) {
        detail::write_text_file(dir_ / "INCOMPLETE", "stage: " + stage + "\n");
        try {
            return fn();
        } catch (const StageError&) {
            throw;
        } catch (const DataError& e) {
            fail(stage, e.what());
            throw StageError(stage, e.what(), true);
        } catch (const std::exception& e) {
            fail(stage, e.what());
            throw StageError(stage, e.what(), false);
        }
    }

    void finish() {
        std::error_code ec;
        fs::remove(dir_ / "INCOMPLETE", ec);
        detail::write_text_file(dir_ / "COMPLETE", "");
    }

private:
    void fail(const std::string& stage, const std::string& cause) {
        try {
            detail::write_text_file(dir_ / "INCOMPLETE", "stage: " + stage + "\nerror: " + cause + "\n");
        } catch (...) {
            // the original failure is what matters
        }
    }

    fs::path dir_;
};

void prepare_run_dir(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) {
            throw ConfigError("output_dir '" + dir.string() + "' exists and is not a directory");
        }
        if (!fs::is_empty(dir, ec)) {
            throw ConfigError("output_dir '" + dir.string() + "' is not empty; run directories are never overwritten");
        }
    }
    fs::create_directories(dir);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const fs::path dir = config.paths.output_dir;
    prepare_run_dir(dir);
    detail::write_text_file(dir / "config.json", config_to_json(config));

    StageTracker stages(dir);
    ExperimentReport report;
    report.run_dir = dir;

    struct Inputs {
        Corpus corpus;
        QuerySet queries;
        QrelSet qrels;
    };
    const Inputs inputs = stages.run("load", [&] {
        Inputs in;
        in.corpus = load_corpus(config.paths.corpus);
        in.queries = load_queries(config.paths.queries);
        in.qrels = load_qrels(config.paths.qrels, in.corpus, in.queries).qrels;
        if (in.corpus.empty()) {
            throw DataError("empty corpus");
        }
        if (in.qrels.query_count() == 0) {
            throw DataError("qrels contain no relevant judgments");
        }
        return in;
    });

    const auto index =
        stages.run("index", [&] { return lexical::InvertedIndex::build(inputs.corpus, config.bm25); });

    struct Stores {
        dense::VectorStore docs{1, true};
        dense::VectorStore queries{1, true};
    };
    const Stores stores = stages.run("embed", [&] {
        Stores s;
        if (config.provider.kind == dense::ProviderKind::file) {
            s.docs = dense::import_vectors(config.paths.doc_vectors);
            s.queries = dense::import_vectors(config.paths.query_vectors, s.docs.dim());
            for (const auto& id : s.docs.ids()) {
                if (!inputs.corpus.contains(id)) {
                    throw DataError("doc vector '" + id + "' has no corpus document");
                }
            }
            for (const auto& id : s.queries.ids()) {
                if (!inputs.queries.contains(id)) {
                    throw DataError("query vector '" + id + "' has no query");
                }
            }
        } else {
            const auto provider = dense::make_provider(config.provider);
            s.docs = embed_records(*provider, inputs.corpus, dense::TextKind::passage);
            s.queries = embed_records(*provider, inputs.queries, dense::TextKind::query);
        }
        return s;
    });

    stages.run("retrieve", [&] {
        report.runs["bm25"] = lexical_run(index, inputs.queries, config.run_depth);
        report.runs["dense"] = dense_run(stores.docs, stores.queries, config.run_depth);
        return 0;
    });
    stages.run("fuse", [&] {
        auto fused = hybrid::fuse(report.runs.at("bm25"), report.runs.at("dense"), config.fusion, "hybrid");
        for (auto& [qid, ranking] : fused.rankings) {
            if (ranking.size() > config.run_depth) {
                ranking.resize(config.run_depth);
            }
        }
        report.runs["hybrid"] = std::move(fused);
        return 0;
    });
    stages.run("evaluate", [&] {
        for (const auto& system : kSystems) {
            report.reports[system] = eval::evaluate_run(report.runs.at(system), inputs.qrels, config.k_values);
        }
        return 0;
    });
    stages.run("significance", [&] {
        std::vector<eval::MetricReport> ordered;
        for (const auto& system : kSystems) {
            ordered.push_back(report.reports.at(system));
        }
        report.significance = stats::compare_reports(ordered, config.baseline_tag, config.wilcoxon);
        return 0;
    });
    stages.run("write", [&] {
        for (const auto& system : kSystems) {
            eval::save_run(dir / "runs" / (system + ".trec"), report.runs.at(system));
            eval::save_report(dir / "reports" / (system + ".json"), report.reports.at(system));
        }
        detail::write_text_file(dir / "significance.json", stats::significance_to_json(report.significance));
        detail::write_text_file(dir / "significance.txt", stats::format_significance_table(report.significance));
        return 0;
    });
    stages.finish();
    return report;
}

}  // namespace faqir::pipeline
