#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "faqir/corpus.hpp"
#include "faqir/error.hpp"
#include "faqir/eval.hpp"
#include "faqir/pipeline.hpp"
#include "faqir/remote_embedder.hpp"
#include "faqir/service.hpp"
#include "faqir/significance.hpp"
#include "faqir/synthetic.hpp"
#include "faqir/text.hpp"

namespace faqir::cli {

using nlohmann::json;

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const pipeline::StageError& e) {
        err << "error: " << e.what() << '\n';
        return e.data_error() ? kDataError : kInternal;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

std::string fixed(double value, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

double mean_tokens(const std::vector<QAPair>& pairs, bool query_side) {
    if (pairs.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& p : pairs) {
        total += static_cast<double>(text::token_count(query_side ? p.query_text : p.positive_text));
    }
    return total / static_cast<double>(pairs.size());
}

std::unique_ptr<dense::EmbeddingProvider> query_encoder(const QueryEncoderOptions& o, std::size_t dim) {
    std::unique_ptr<dense::EmbeddingProvider> encoder;
    switch (o.provider) {
        case dense::ProviderKind::mock:
            encoder = std::make_unique<dense::MockEmbedder>(
                dim, o.synonyms.empty() ? dense::SynonymTable{} : dense::load_synonyms(o.synonyms));
            break;
        case dense::ProviderKind::remote:
            if (o.endpoint.empty()) {
                throw ConfigError("the remote provider needs --endpoint");
            }
            encoder = std::make_unique<dense::RemoteEmbedder>(o.endpoint, dim);
            break;
        case dense::ProviderKind::file:
            throw ConfigError("a vector file cannot encode new query text; use the mock or remote provider");
    }
    encoder->set_prefixes(o.query_prefix, "");
    return encoder;
}

}  // namespace

Searcher open_searcher(const SearchOptions& o) {
    std::shared_ptr<const lexical::InvertedIndex> index;
    if (!o.index.empty()) {
        index = std::make_shared<const lexical::InvertedIndex>(lexical::InvertedIndex::load(o.index));
    } else if (!o.corpus.empty()) {
        index = std::make_shared<const lexical::InvertedIndex>(lexical::InvertedIndex::build(load_corpus(o.corpus)));
    }
    std::shared_ptr<const dense::VectorStore> vectors;
    std::shared_ptr<const dense::EmbeddingProvider> encoder;
    if (!o.vectors.empty()) {
        auto store = std::make_shared<const dense::VectorStore>(dense::import_vectors(o.vectors));
        encoder = query_encoder(o.encoder, store->dim());
        vectors = std::move(store);
    }
    return Searcher(std::move(index), std::move(vectors), std::move(encoder), o.fusion);
}

int cmd_ingest(const GlobalOptions& g, const IngestOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto pairs = load_pairs(o.pairs);
        for (auto& p : pairs) {
            p.query_text = text::normalize(p.query_text);
            p.positive_text = text::normalize(p.positive_text);
        }
        SplitSpec spec{o.train, o.val, o.test, g.seed.value_or(0)};
        const auto split = split_pairs(pairs, spec);
        save_pairs(o.out_dir / "train.jsonl", split.train);
        save_pairs(o.out_dir / "val.jsonl", split.val);
        save_pairs(o.out_dir / "test.jsonl", split.test);

        std::vector<std::string> questions;
        questions.reserve(pairs.size());
        for (const auto& p : pairs) {
            questions.push_back(p.query_text);
        }
        const dense::MockEmbedder embedder(o.dim);
        const auto duplicates = find_near_duplicates(questions, embedder, o.dedup_threshold);
        std::string dup_tsv = "first\tsecond\tsimilarity\n";
        for (const auto& d : duplicates) {
            dup_tsv += std::to_string(d.first) + "\t" + std::to_string(d.second) + "\t" + format_score(d.similarity) +
                       "\n";
        }
        write_file(o.out_dir / "duplicates.tsv", dup_tsv);

        const json stats = {{"pairs", pairs.size()},
                            {"train", split.train.size()},
                            {"val", split.val.size()},
                            {"test", split.test.size()},
                            {"mean_query_tokens", mean_tokens(pairs, true)},
                            {"mean_answer_tokens", mean_tokens(pairs, false)},
                            {"duplicate_candidates", duplicates.size()}};
        if (g.json) {
            out << stats.dump(2) << '\n';
        } else {
            out << "pairs\t" << pairs.size() << '\n'
                << "train\t" << split.train.size() << '\n'
                << "val\t" << split.val.size() << '\n'
                << "test\t" << split.test.size() << '\n'
                << "mean_query_tokens\t" << fixed(stats["mean_query_tokens"].get<double>(), 2) << '\n'
                << "mean_answer_tokens\t" << fixed(stats["mean_answer_tokens"].get<double>(), 2) << '\n'
                << "duplicate_candidates\t" << duplicates.size() << '\n';
        }
        if (!duplicates.empty()) {
            err << duplicates.size() << " near-duplicate question pairs listed in "
                << (o.out_dir / "duplicates.tsv").string() << '\n';
        }
        return kOk;
    });
}

int cmd_index(const GlobalOptions& g, const IndexOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto corpus = load_corpus(o.corpus);
        if (corpus.size() == 0) {
            throw DataError(o.corpus.string() + ": empty corpus");
        }
        const auto index = lexical::InvertedIndex::build(corpus, o.bm25);
        index.save(o.out);
        if (g.json) {
            out << json{{"documents", index.doc_count()},
                        {"vocabulary", index.vocabulary_size()},
                        {"avgdl", index.avg_doc_length()}}
                       .dump()
                << '\n';
        } else {
            out << "documents\t" << index.doc_count() << "\tvocabulary\t" << index.vocabulary_size() << "\tavgdl\t"
                << fixed(index.avg_doc_length()) << '\n';
        }
        return kOk;
    });
}

int cmd_embed(const GlobalOptions& g, const EmbedOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto records = load_corpus(o.input);
        auto provider = dense::make_provider(o.provider);
        std::vector<std::string> ids;
        std::vector<std::string> texts;
        for (const auto& d : records.records()) {
            ids.push_back(d.id);
            texts.push_back(d.text);
        }
        const auto store = dense::embed_to_store(*provider, ids, texts, o.kind);
        const std::string model = o.provider.model_name.value_or(std::string(dense::to_string(o.provider.kind)));
        dense::save_vectors(o.out, store, model);
        if (g.json) {
            out << json{{"vectors", store.size()}, {"dim", store.dim()}, {"model", model}}.dump() << '\n';
        } else {
            out << "vectors\t" << store.size() << "\tdim\t" << store.dim() << "\tmodel\t" << model << '\n';
        }
        return kOk;
    });
}

int cmd_embed_import(const GlobalOptions& g, const EmbedImportOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto store = dense::import_vectors(o.vectors, o.dim);
        std::size_t missing = 0;
        if (!o.corpus.empty()) {
            const auto corpus = load_corpus(o.corpus);
            std::string first_missing;
            for (const auto& d : corpus.records()) {
                if (!store.contains(d.id)) {
                    if (missing == 0) {
                        first_missing = d.id;
                    }
                    ++missing;
                }
            }
            if (missing > 0) {
                throw DataError(std::to_string(missing) + " corpus documents have no vector (first: '" +
                                first_missing + "')");
            }
        }
        if (g.json) {
            out << json{{"vectors", store.size()}, {"dim", store.dim()}, {"normalized", store.normalized()}}.dump()
                << '\n';
        } else {
            out << "vectors\t" << store.size() << "\tdim\t" << store.dim() << "\tnormalized\t"
                << (store.normalized() ? "true" : "false") << '\n';
        }
        return kOk;
    });
}

int cmd_search(const GlobalOptions& g, const SearchOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.k == 0) {
            throw InvalidArgument("k must be at least 1");
        }
        if (o.mode != SearchMode::bm25 && o.vectors.empty()) {
            throw ModeUnavailable("mode " + std::string(to_string(o.mode)) + " needs --vectors");
        }
        if (o.mode != SearchMode::dense && o.index.empty() && o.corpus.empty()) {
            throw ModeUnavailable("mode " + std::string(to_string(o.mode)) + " needs --index or --corpus");
        }
        const auto searcher = open_searcher(o);
        const auto ranking = searcher.search(o.query, o.k, o.mode);
        if (g.json) {
            json results = json::array();
            for (std::size_t i = 0; i < ranking.size(); ++i) {
                results.push_back({{"id", ranking[i].id}, {"score", ranking[i].score}, {"rank", i + 1}});
            }
            out << json{{"query", o.query}, {"mode", to_string(o.mode)}, {"results", results}}.dump() << '\n';
        } else {
            for (const auto& doc : ranking) {
                out << doc.id << '\t' << format_score(doc.score) << '\n';
            }
        }
        return kOk;
    });
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto ks = eval::parse_k_values(o.k_values);
        const auto run = eval::load_run(o.run);
        const auto qrels = load_qrels(o.qrels);
        for (const auto& w : qrels.warnings) {
            err << "warning: " << w << '\n';
        }
        const auto report = eval::evaluate_run(run, qrels.qrels, ks);
        if (!o.out.empty()) {
            eval::save_report(o.out, report);
        }
        if (g.json) {
            out << eval::report_to_json(report);
        } else {
            out << eval::format_report_table(report);
        }
        return kOk;
    });
}

int cmd_fuse(const GlobalOptions& g, const FuseOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        o.fusion.validate();
        const auto lexical_run = eval::load_run(o.lexical);
        const auto dense_run = eval::load_run(o.dense);
        const auto fused = hybrid::fuse(lexical_run, dense_run, o.fusion, o.tag);
        eval::save_run(o.out, fused);
        if (g.json) {
            out << json{{"queries", fused.rankings.size()}, {"method", hybrid::to_string(o.fusion.method)}}.dump()
                << '\n';
        } else {
            out << "queries\t" << fused.rankings.size() << "\tmethod\t" << hybrid::to_string(o.fusion.method) << '\n';
        }
        return kOk;
    });
}

int cmd_compare(const GlobalOptions& g, const CompareOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.reports.size() < 2) {
            throw ConfigError("compare needs at least two reports");
        }
        std::vector<eval::MetricReport> reports;
        for (const auto& path : o.reports) {
            reports.push_back(eval::load_report(path));
        }
        const auto table = stats::compare_reports(reports, o.baseline, {o.wilcoxon_exact_cutoff});
        const auto as_json = stats::significance_to_json(table);
        if (!o.out.empty()) {
            write_file(o.out, as_json);
        }
        out << (g.json ? as_json : stats::format_significance_table(table));
        return kOk;
    });
}

int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const pipeline::SyntheticSpec spec{o.queries, o.relevant, o.distractors, o.vocabulary, o.noise};
        const auto dataset = pipeline::generate_synthetic_dataset(spec, g.seed.value_or(0));
        pipeline::save_dataset(o.out_dir, dataset);
        if (g.json) {
            out << json{{"documents", dataset.corpus.size()},
                        {"queries", dataset.queries.size()},
                        {"judgments", dataset.qrels.judgment_count()}}
                       .dump()
                << '\n';
        } else {
            out << "documents\t" << dataset.corpus.size() << "\tqueries\t" << dataset.queries.size()
                << "\tjudgments\t" << dataset.qrels.judgment_count() << '\n';
        }
        return kOk;
    });
}

int cmd_experiment(const GlobalOptions& g, const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (g.config.empty()) {
            throw ConfigError("experiment needs --config");
        }
        auto config = pipeline::load_config(g.config);
        if (g.seed) {
            config.seed = *g.seed;
        }
        if (!o.output_dir.empty()) {
            config.paths.output_dir = o.output_dir;
        }
        const auto result = pipeline::run_experiment(config);
        out << (g.json ? stats::significance_to_json(result.significance)
                       : stats::format_significance_table(result.significance));
        err << "run directory: " << result.run_dir.string() << '\n';
        return kOk;
    });
}

int cmd_serve(const GlobalOptions&, const ServeOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.sources.corpus.empty()) {
            throw ConfigError("serve needs --corpus for result text");
        }
        auto corpus = std::make_shared<const Corpus>(load_corpus(o.sources.corpus));
        auto searcher = std::make_shared<const Searcher>(open_searcher(o.sources));
        auto service = std::make_shared<const service::SearchService>(corpus, searcher);
        service::HttpServer server(service);
        const int port = server.bind(o.host, o.port);
        if (port < 0) {
            throw DataError("cannot bind " + o.host + ":" + std::to_string(o.port));
        }
        out << "listening on " << o.host << ':' << port << std::endl;
        return server.listen() ? kOk : kInternal;
    });
}

// --- argument parsing -----------------------------------------------------------

namespace {

template <typename Enum>
std::function<void(const std::string&)> enum_setter(Enum& target, Enum (*parse)(std::string_view)) {
    return [&target, parse](const std::string& value) { target = parse(value); };
}

void add_fusion_flags(CLI::App* app, hybrid::FusionConfig& fusion) {
    app->add_option_function<std::string>("--fusion", enum_setter(fusion.method, hybrid::fusion_method_from_string),
                                          "weighted_minmax or rrf");
    app->add_option("--alpha", fusion.alpha, "dense weight for weighted_minmax");
    app->add_option("--rrf-k", fusion.rrf_k, "rank offset for rrf");
    app->add_option("--depth", fusion.depth, "candidates taken from each side");
}

void add_source_flags(CLI::App* app, SearchOptions& o) {
    app->add_option("--index", o.index, "saved BM25 index");
    app->add_option("--corpus", o.corpus, "corpus JSON lines (indexed in memory when --index is absent)");
    app->add_option("--vectors", o.vectors, "document vector file");
    app->add_option_function<std::string>("--provider",
                                          enum_setter(o.encoder.provider, dense::provider_kind_from_string),
                                          "query encoder: mock or remote");
    app->add_option("--endpoint", o.encoder.endpoint, "remote embedding server base URL");
    app->add_option("--synonyms", o.encoder.synonyms, "synonym table for the mock encoder");
    app->add_option("--query-prefix", o.encoder.query_prefix, "text prepended to queries before encoding");
    add_fusion_flags(app, o.fusion);
}

dense::TextKind text_kind_from_string(std::string_view name) {
    if (name == "query") {
        return dense::TextKind::query;
    }
    if (name == "passage") {
        return dense::TextKind::passage;
    }
    throw ConfigError("unknown text kind '" + std::string(name) + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid lexical and dense FAQ retrieval with an evaluation harness", "faqir"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "experiment config JSON");
    auto* seed_opt = app.add_option("--seed", seed, "seed for splitting and generation");
    app.add_flag("--json", g.json, "write tabular output as JSON");

    std::function<int()> dispatch;

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "normalize and split question-answer pairs");
    c_ingest->add_option("--pairs", ingest.pairs, "pairs JSON lines")->required();
    c_ingest->add_option("--out", ingest.out_dir, "output directory")->required();
    c_ingest->add_option("--train", ingest.train);
    c_ingest->add_option("--val", ingest.val);
    c_ingest->add_option("--test", ingest.test);
    c_ingest->add_option("--dedup-threshold", ingest.dedup_threshold, "cosine threshold for duplicate candidates");
    c_ingest->add_option("--dim", ingest.dim, "mock embedding dimension for duplicate detection");
    c_ingest->callback([&] { dispatch = [&] { return cmd_ingest(g, ingest, out, err); }; });

    IndexOptions index;
    auto* c_index = app.add_subcommand("index", "build and save a BM25 index");
    c_index->add_option("--corpus", index.corpus)->required();
    c_index->add_option("--out", index.out)->required();
    c_index->add_option("--k1", index.bm25.k1);
    c_index->add_option("--b", index.bm25.b);
    c_index->callback([&] { dispatch = [&] { return cmd_index(g, index, out, err); }; });

    EmbedOptions embed;
    std::string provider_name = "mock";
    std::string kind_name = "passage";
    std::string model_name;
    auto* c_embed = app.add_subcommand("embed", "encode a corpus or query file into a vector file");
    c_embed->add_option("--input", embed.input)->required();
    c_embed->add_option("--out", embed.out)->required();
    c_embed->add_option("--kind", kind_name, "query or passage");
    c_embed->add_option("--provider", provider_name, "mock or remote");
    c_embed->add_option("--dim", embed.provider.dim);
    c_embed->add_option("--endpoint", embed.provider.endpoint);
    c_embed->add_option("--synonyms", embed.provider.synonyms);
    c_embed->add_option("--model", model_name, "model name recorded in the file header");
    c_embed->add_option("--query-prefix", embed.provider.query_prefix);
    c_embed->add_option("--passage-prefix", embed.provider.passage_prefix);
    c_embed->callback([&] {
        dispatch = [&] {
            return guarded(err, [&] {
                embed.kind = text_kind_from_string(kind_name);
                embed.provider.kind = dense::provider_kind_from_string(provider_name);
                if (!model_name.empty()) {
                    embed.provider.model_name = model_name;
                }
                return cmd_embed(g, embed, out, err);
            });
        };
    });

    EmbedImportOptions import;
    auto* c_import = app.add_subcommand("embed-import", "validate an externally produced vector file");
    c_import->add_option("--vectors", import.vectors)->required();
    c_import->add_option("--dim", import.dim, "expected dimension (0 accepts the header)");
    c_import->add_option("--corpus", import.corpus, "require a vector for every corpus document");
    c_import->callback([&] { dispatch = [&] { return cmd_embed_import(g, import, out, err); }; });

    SearchOptions search;
    std::string mode_name = "hybrid";
    auto* c_search = app.add_subcommand("search", "top-k retrieval for one query");
    c_search->add_option("--query,-q", search.query)->required();
    c_search->add_option("--k,-k", search.k);
    c_search->add_option("--mode", mode_name, "bm25, dense or hybrid");
    add_source_flags(c_search, search);
    c_search->callback([&] {
        dispatch = [&] {
            return guarded(err, [&] {
                search.mode = search_mode_from_string(mode_name);
                return cmd_search(g, search, out, err);
            });
        };
    });

    EvalOptions evaluation;
    auto* c_eval = app.add_subcommand("eval", "score a TREC run against qrels");
    c_eval->add_option("--run", evaluation.run)->required();
    c_eval->add_option("--qrels", evaluation.qrels)->required();
    c_eval->add_option("--k", evaluation.k_values, "comma-separated cutoffs");
    c_eval->add_option("--out", evaluation.out, "JSON report path");
    c_eval->callback([&] { dispatch = [&] { return cmd_eval(g, evaluation, out, err); }; });

    FuseOptions fuse;
    auto* c_fuse = app.add_subcommand("fuse", "fuse a lexical and a dense run");
    c_fuse->add_option("--lexical", fuse.lexical)->required();
    c_fuse->add_option("--dense", fuse.dense)->required();
    c_fuse->add_option("--out", fuse.out)->required();
    c_fuse->add_option("--tag", fuse.tag);
    add_fusion_flags(c_fuse, fuse.fusion);
    c_fuse->callback([&] { dispatch = [&] { return cmd_fuse(g, fuse, out, err); }; });

    CompareOptions compare;
    auto* c_compare = app.add_subcommand("compare", "significance of each report against a baseline");
    c_compare->add_option("reports", compare.reports, "metric report JSON files")->required();
    c_compare->add_option("--baseline", compare.baseline);
    c_compare->add_option("--out", compare.out, "significance JSON path");
    c_compare->add_option("--wilcoxon-exact-cutoff", compare.wilcoxon_exact_cutoff);
    c_compare->callback([&] { dispatch = [&] { return cmd_compare(g, compare, out, err); }; });

    SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic FAQ collection");
    c_synth->add_option("--out", synth.out_dir)->required();
    c_synth->add_option("--queries", synth.queries);
    c_synth->add_option("--relevant", synth.relevant);
    c_synth->add_option("--distractors", synth.distractors);
    c_synth->add_option("--vocabulary", synth.vocabulary);
    c_synth->add_option("--noise", synth.noise);
    c_synth->callback([&] { dispatch = [&] { return cmd_synth(g, synth, out, err); }; });

    ExperimentOptions experiment;
    auto* c_experiment = app.add_subcommand("experiment", "run the full retrieval and evaluation pipeline");
    c_experiment->add_option("--output-dir", experiment.output_dir);
    c_experiment->callback([&] { dispatch = [&] { return cmd_experiment(g, experiment, out, err); }; });

    ServeOptions serve;
    auto* c_serve = app.add_subcommand("serve", "HTTP search endpoint");
    add_source_flags(c_serve, serve.sources);
    c_serve->add_option("--host", serve.host);
    c_serve->add_option("--port", serve.port);
    c_serve->callback([&] { dispatch = [&] { return cmd_serve(g, serve, out, err); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        // enum option values are parsed by the library during parsing
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    if (*seed_opt) {
        g.seed = seed;
    }
    return dispatch ? dispatch() : kUsage;
}

}  // namespace faqir::cli
