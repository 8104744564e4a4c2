#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/ranking.hpp"

namespace faqir::eval {

/// Per-query rankings produced by one system.
struct Run {
    std::string tag;
    std::map<std::string, Ranking> rankings;

    /// Throws DataError on duplicate documents within a query or scores
    /// that increase down a ranking.
    void validate() const;

    friend bool operator==(const Run&, const Run&) = default;
};

// TREC run format: "query-id Q0 document-id rank score tag", rank 1-based.
Run read_trec_run(std::istream& in);
Run load_run(const std::filesystem::path& path);
void write_trec_run(std::ostream& out, const Run& run);
void save_run(const std::filesystem::path& path, const Run& run);

enum class Metric { accuracy, precision, recall, mrr, ndcg };

inline constexpr Metric kAllMetrics[] = {Metric::accuracy, Metric::precision, Metric::recall, Metric::mrr,
                                         Metric::ndcg};

std::string_view to_string(Metric metric);

/// "recall@10" style key used in reports.
std::string metric_key(Metric metric, std::size_t k);

/// Value of one metric for one ranking against its relevant set. Requires
/// a non-empty relevant set and k >= 1.
double score_query(Metric metric, const Ranking& ranking, const QrelSet::Judgments& relevant, std::size_t k);

struct MetricValues {
    std::map<std::string, double> per_query;
    double mean = 0.0;
};

/// Scores every query that has judgments in `qrels`. Queries missing from
/// the run score 0; queries without judgments are ignored. Throws DataError
/// if the run and qrels share no query.
MetricValues evaluate_metric(Metric metric, const Run& run, const QrelSet& qrels, std::size_t k);

inline MetricValues recall_at_k(const Run& run, const QrelSet& qrels, std::size_t k) {
    return evaluate_metric(Metric::recall, run, qrels, k);
}
inline MetricValues precision_at_k(const Run& run, const QrelSet& qrels, std::size_t k) {
    return evaluate_metric(Metric::precision, run, qrels, k);
}
inline MetricValues accuracy_at_k(const Run& run, const QrelSet& qrels, std::size_t k) {
    return evaluate_metric(Metric::accuracy, run, qrels, k);
}
inline MetricValues mrr_at_k(const Run& run, const QrelSet& qrels, std::size_t k) {
    return evaluate_metric(Metric::mrr, run, qrels, k);
}
inline MetricValues ndcg_at_k(const Run& run, const QrelSet& qrels, std::size_t k) {
    return evaluate_metric(Metric::ndcg, run, qrels, k);
}

struct MetricReport {
    std::string tag;
    std::vector<std::size_t> k_values;
    /// metric key -> query id -> value
    std::map<std::string, std::map<std::string, double>> per_query;
    /// metric key -> mean over evaluated queries
    std::map<std::string, double> aggregate;
    std::size_t evaluated_queries = 0;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// All five metrics at every cutoff. Per-query values are kept for
/// significance testing.
MetricReport evaluate_run(const Run& run, const QrelSet& qrels, std::span<const std::size_t> k_values);

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(std::string_view json_text);
void save_report(const std::filesystem::path& path, const MetricReport& report);
MetricReport load_report(const std::filesystem::path& path);

/// Aligned plain-text table of aggregate values: one row per metric, one
/// column per cutoff.
std::string format_report_table(const MetricReport& report);

/// Parses "5,10" into {5, 10}. Throws ConfigError on empty, zero or
/// non-numeric entries.
std::vector<std::size_t> parse_k_values(std::string_view text);

}  // namespace faqir::eval
