#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "faqir/dense.hpp"
#include "faqir/hybrid.hpp"
#include "faqir/lexical.hpp"
#include "faqir/searcher.hpp"

namespace faqir::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kInternal = 3,
};

/// Flags accepted before or after any subcommand.
struct GlobalOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    bool json = false;
};

struct IngestOptions {
    std::filesystem::path pairs;
    std::filesystem::path out_dir;
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
    double dedup_threshold = 0.95;
    std::size_t dim = 256;
};

struct IndexOptions {
    std::filesystem::path corpus;
    std::filesystem::path out;
    lexical::BM25Params bm25;
};

/// Where query vectors come from at search time.
struct QueryEncoderOptions {
    dense::ProviderKind provider = dense::ProviderKind::mock;
    std::string endpoint;
    std::filesystem::path synonyms;
    std::string query_prefix;
};

struct SearchOptions {
    std::filesystem::path index;    ///< saved BM25 index
    std::filesystem::path corpus;   ///< alternative to `index`: built in memory
    std::filesystem::path vectors;  ///< document vector file
    std::string query;
    std::size_t k = 10;
    SearchMode mode = SearchMode::hybrid;
    QueryEncoderOptions encoder;
    hybrid::FusionConfig fusion;
};

struct EmbedOptions {
    std::filesystem::path input;  ///< JSON lines with "_id" and "text"
    std::filesystem::path out;
    dense::TextKind kind = dense::TextKind::passage;
    dense::EmbeddingProviderSpec provider;
};

struct EmbedImportOptions {
    std::filesystem::path vectors;
    std::size_t dim = 0;
    std::filesystem::path corpus;  ///< optional coverage check
};

struct EvalOptions {
    std::filesystem::path run;
    std::filesystem::path qrels;
    std::string k_values = "1,5,10";
    std::filesystem::path out;  ///< JSON report; skipped when empty
};

struct FuseOptions {
    std::filesystem::path lexical;
    std::filesystem::path dense;
    std::filesystem::path out;
    std::string tag = "hybrid";
    hybrid::FusionConfig fusion;
};

struct CompareOptions {
    std::vector<std::filesystem::path> reports;
    std::string baseline = "bm25";
    std::filesystem::path out;  ///< significance JSON; skipped when empty
    std::size_t wilcoxon_exact_cutoff = 25;
};

struct SynthOptions {
    std::filesystem::path out_dir;
    std::size_t queries = 82;
    std::size_t relevant = 10;
    std::size_t distractors = 2000;
    std::size_t vocabulary = 5000;
    double noise = 0.2;
};

struct ExperimentOptions {
    std::filesystem::path output_dir;  ///< overrides the config when set
};

struct ServeOptions {
    SearchOptions sources;  ///< query, k and mode unused
    std::string host = "127.0.0.1";
    int port = 8080;
};

// Each command writes data to `out` and diagnostics to `err`, and returns
// an ExitCode. Library exceptions are mapped to exit codes here.
int cmd_ingest(const GlobalOptions& g, const IngestOptions& o, std::ostream& out, std::ostream& err);
int cmd_index(const GlobalOptions& g, const IndexOptions& o, std::ostream& out, std::ostream& err);
int cmd_embed(const GlobalOptions& g, const EmbedOptions& o, std::ostream& out, std::ostream& err);
int cmd_embed_import(const GlobalOptions& g, const EmbedImportOptions& o, std::ostream& out, std::ostream& err);
int cmd_search(const GlobalOptions& g, const SearchOptions& o, std::ostream& out, std::ostream& err);
int cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out, std::ostream& err);
int cmd_fuse(const GlobalOptions& g, const FuseOptions& o, std::ostream& out, std::ostream& err);
int cmd_compare(const GlobalOptions& g, const CompareOptions& o, std::ostream& out, std::ostream& err);
int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out, std::ostream& err);
int cmd_experiment(const GlobalOptions& g, const ExperimentOptions& o, std::ostream& out, std::ostream& err);
int cmd_serve(const GlobalOptions& g, const ServeOptions& o, std::ostream& out, std::ostream& err);

/// Loads the sources named in `o` into a Searcher. Shared by search and serve.
Searcher open_searcher(const SearchOptions& o);

/// Parses `args` (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faqir::cli
