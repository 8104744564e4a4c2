#include "faqir/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "faqir/error.hpp"
#include "io_util.hpp"

namespace faqir::eval {

using nlohmann::json;

void Run::validate() const {
    for (const auto& [qid, ranking] : rankings) {
        std::set<std::string_view> seen;
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            if (!seen.insert(ranking[i].id).second) {
                throw DataError("query '" + qid + "': document '" + ranking[i].id + "' ranked twice");
            }
            if (i > 0 && ranking[i].score > ranking[i - 1].score) {
                throw DataError("query '" + qid + "': scores increase at rank " + std::to_string(i + 1));
            }
        }
    }
}

// --- TREC run files -------------------------------------------------------------

Run read_trec_run(std::istream& in) {
    struct Line {
        std::size_t rank;
        ScoredDoc doc;
    };
    std::map<std::string, std::vector<Line>> lines;
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string q0;
        std::string doc;
        std::string rank_text;
        std::string score_text;
        std::string tag;
        std::string extra;
        if (!(fields >> qid >> q0 >> doc >> rank_text >> score_text >> tag) || (fields >> extra)) {
            throw DataError("line " + std::to_string(line_no) + ": expected 'query-id Q0 doc-id rank score tag'");
        }
        std::size_t rank = 0;
        double score = 0.0;
        const auto r = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
        const auto s = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
        if (r.ec != std::errc{} || r.ptr != rank_text.data() + rank_text.size() || rank == 0) {
            throw DataError("line " + std::to_string(line_no) + ": bad rank '" + rank_text + "'");
        }
        if (s.ec != std::errc{} || s.ptr != score_text.data() + score_text.size() || !std::isfinite(score)) {
            throw DataError("line " + std::to_string(line_no) + ": bad score '" + score_text + "'");
        }
        if (run.tag.empty()) {
            run.tag = tag;
        }
        lines[qid].push_back({rank, {doc, score}});
    }
    for (auto& [qid, entries] : lines) {
        std::stable_sort(entries.begin(), entries.end(), [](const Line& a, const Line& b) { return a.rank < b.rank; });
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].rank == entries[i - 1].rank) {
                throw DataError("query '" + qid + "': rank " + std::to_string(entries[i].rank) + " appears twice");
            }
        }
        auto& ranking = run.rankings[qid];
        for (auto& e : entries) {
            ranking.push_back(std::move(e.doc));
        }
    }
    run.validate();
    return run;
}

Run load_run(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_trec_run(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_trec_run(std::ostream& out, const Run& run) {
    const std::string tag = run.tag.empty() ? "run" : run.tag;
    for (const auto& [qid, ranking] : run.rankings) {
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            out << qid << " Q0 " << ranking[i].id << ' ' << (i + 1) << ' ' << detail::format_double(ranking[i].score)
                << ' ' << tag << '\n';
        }
    }
}

void save_run(const std::filesystem::path& path, const Run& run) {
    auto out = detail::open_output(path);
    write_trec_run(out, run);
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

// --- metrics ------------------------------------------------------------------

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::accuracy:
            return "accuracy";
        case Metric::precision:
            return "precision";
        case Metric::recall:
            return "recall";
        case Metric::mrr:
            return "mrr";
        case Metric::ndcg:
            return "ndcg";
    }
    return "unknown";
}

std::string metric_key(Metric metric, std::size_t k) { return std::string(to_string(metric)) + "@" + std::to_string(k); }

double score_query(Metric metric, const Ranking& ranking, const QrelSet::Judgments& relevant, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    if (relevant.empty()) {
        throw Error("internal: query with no relevant documents reached the scorer");
    }
    const std::size_t depth = std::min(k, ranking.size());
    std::size_t hits = 0;
    std::size_t first_hit = 0;  // 1-based, 0 = none
    double dcg = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.contains(ranking[i].id)) {
            ++hits;
            if (first_hit == 0) {
                first_hit = i + 1;
            }
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
        }
    }
    switch (metric) {
        case Metric::accuracy:
            return hits > 0 ? 1.0 : 0.0;
        case Metric::precision:
            return static_cast<double>(hits) / static_cast<double>(k);
        case Metric::recall:
            return static_cast<double>(hits) / static_cast<double>(relevant.size());
        case Metric::mrr:
            return first_hit == 0 ? 0.0 : 1.0 / static_cast<double>(first_hit);
        case Metric::ndcg: {
            const std::size_t ideal = std::min(k, relevant.size());
            double idcg = 0.0;
            for (std::size_t i = 0; i < ideal; ++i) {
                idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
            }
            return dcg / idcg;
        }
    }
    return 0.0;
}

namespace {

void require_overlap(const Run& run, const QrelSet& qrels) {
    for (const auto& [qid, docs] : qrels.all()) {
        if (run.rankings.contains(qid)) {
            return;
        }
    }
    throw DataError("zero evaluable queries: the run covers no query that has relevance judgments");
}

double mean_of(const std::map<std::string, double>& values) {
    double sum = 0.0;
    for (const auto& [q, v] : values) {
        sum += v;
    }
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

MetricValues evaluate_metric(Metric metric, const Run& run, const QrelSet& qrels, std::size_t k) {
    require_overlap(run, qrels);
    static const Ranking kEmpty;
    MetricValues values;
    for (const auto& [qid, relevant] : qrels.all()) {
        const auto it = run.rankings.find(qid);
        values.per_query[qid] = score_query(metric, it == run.rankings.end() ? kEmpty : it->second, relevant, k);
    }
    values.mean = mean_of(values.per_query);
    return values;
}

MetricReport evaluate_run(const Run& run, const QrelSet& qrels, std::span<const std::size_t> k_values) {
    if (k_values.empty()) {
        throw ConfigError("at least one cutoff k is required");
    }
    MetricReport report;
    report.tag = run.tag;
    report.k_values.assign(k_values.begin(), k_values.end());
    for (const auto k : k_values) {
        for (const auto metric : kAllMetrics) {
            auto values = evaluate_metric(metric, run, qrels, k);
            const auto key = metric_key(metric, k);
            report.aggregate[key] = values.mean;
            report.per_query[key] = std::move(values.per_query);
        }
    }
    report.evaluated_queries = qrels.query_count();
    return report;
}

// --- report I/O ---------------------------------------------------------------

std::string report_to_json(const MetricReport& report) {
    json root = {{"tag", report.tag},
                 {"k_values", report.k_values},
                 {"evaluated_queries", report.evaluated_queries},
                 {"aggregate", report.aggregate},
                 {"per_query", report.per_query}};
    return root.dump(2) + "\n";
}

MetricReport report_from_json(std::string_view json_text) {
    try {
        const json root = json::parse(json_text);
        MetricReport report;
        report.tag = root.at("tag").get<std::string>();
        report.k_values = root.at("k_values").get<std::vector<std::size_t>>();
        report.evaluated_queries = root.at("evaluated_queries").get<std::size_t>();
        report.aggregate = root.at("aggregate").get<std::map<std::string, double>>();
        report.per_query = root.at("per_query").get<std::map<std::string, std::map<std::string, double>>>();
        return report;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed metric report: ") + e.what());
    }
}

void save_report(const std::filesystem::path& path, const MetricReport& report) {
    detail::write_text_file(path, report_to_json(report));
}

MetricReport load_report(const std::filesystem::path& path) {
    try {
        return report_from_json(detail::read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string format_report_table(const MetricReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(12) << (report.tag.empty() ? "metric" : report.tag);
    for (const auto k : report.k_values) {
        out << std::right << std::setw(10) << ("@" + std::to_string(k));
    }
    out << '\n';
    for (const auto metric : kAllMetrics) {
        out << std::left << std::setw(12) << to_string(metric);
        for (const auto k : report.k_values) {
            const auto it = report.aggregate.find(metric_key(metric, k));
            out << std::right << std::setw(10) << std::fixed << std::setprecision(4)
                << (it == report.aggregate.end() ? 0.0 : it->second);
        }
        out << '\n';
    }
    out << "queries: " << report.evaluated_queries << '\n';
    return out.str();
}

std::vector<std::size_t> parse_k_values(std::string_view text) {
    std::vector<std::size_t> ks;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!piece.empty() && piece.front() == ' ') {
            piece.remove_prefix(1);
        }
        while (!piece.empty() && piece.back() == ' ') {
            piece.remove_suffix(1);
        }
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), k);
        if (piece.empty() || ec != std::errc{} || ptr != piece.data() + piece.size() || k == 0) {
            throw ConfigError("invalid cutoff list '" + std::string(text) + "'");
        }
        ks.push_back(k);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return ks;
}

}  // namespace faqir::eval
