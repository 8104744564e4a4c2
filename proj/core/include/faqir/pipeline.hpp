#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/dense.hpp"
#include "faqir/eval.hpp"
#include "faqir/hybrid.hpp"
#include "faqir/lexical.hpp"
#include "faqir/significance.hpp"

namespace faqir::pipeline {

struct ExperimentPaths {
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path qrels;
    std::filesystem::path doc_vectors;    ///< provider kind "file" only
    std::filesystem::path query_vectors;  ///< provider kind "file" only
    std::filesystem::path output_dir;
};

/// Everything an experiment depends on. Serialized verbatim into the run
/// directory as config.json.
struct ExperimentConfig {
    ExperimentPaths paths;
    lexical::BM25Params bm25;
    hybrid::FusionConfig fusion;
    std::vector<std::size_t> k_values{1, 5, 10};
    dense::EmbeddingProviderSpec provider;
    std::string baseline_tag = "bm25";
    std::uint64_t seed = 0;
    std::size_t run_depth = 100;  ///< documents kept per query in each run file
    stats::WilcoxonOptions wilcoxon;

    /// Parameter checks only; input files are checked when the run starts.
    void validate() const;
};

/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
ExperimentConfig config_from_json(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// Names of the systems every experiment produces, in output order.
inline const std::vector<std::string> kSystems{"bm25", "dense", "hybrid"};

struct ExperimentReport {
    std::filesystem::path run_dir;
    std::map<std::string, eval::Run> runs;
    std::map<std::string, eval::MetricReport> reports;
    stats::SignificanceTable significance;
};

/// Preprocess, index, retrieve with bm25 / dense / hybrid, evaluate and
/// test every system against the baseline. Writes under paths.output_dir:
///   config.json, runs/<system>.trec, reports/<system>.json,
///   significance.json, significance.txt, COMPLETE
/// The directory must not exist or be empty. A failure leaves an
/// INCOMPLETE marker naming the stage and rethrows as StageError.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Failure inside run_experiment; what() starts with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause, bool data_error)
        : Error(stage + ": " + cause), stage_(std::move(stage)), data_error_(data_error) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    /// True when the cause was a DataError (bad input files).
    [[nodiscard]] bool data_error() const noexcept { return data_error_; }

private:
    std::string stage_;
    bool data_error_;
};

/// Lexical run over every query, `depth` documents each.
eval::Run lexical_run(const lexical::InvertedIndex& index, const QuerySet& queries, std::size_t depth);

/// Dense run over every query vector present in `query_vectors`.
eval::Run dense_run(const dense::VectorStore& docs, const dense::VectorStore& query_vectors, std::size_t depth);

}  // namespace faqir::pipeline
