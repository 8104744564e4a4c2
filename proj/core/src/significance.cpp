#include "faqir/significance.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "faqir/error.hpp"

namespace faqir::stats {

using nlohmann::json;

const ComparisonCell* SignificanceTable::find(const std::string& system, const std::string& metric) const {
    for (const auto& c : cells) {
        if (c.system == system && c.metric == metric) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

std::vector<std::string> metric_order(const eval::MetricReport& report) {
    std::vector<std::string> keys;
    for (const auto k : report.k_values) {
        for (const auto m : eval::kAllMetrics) {
            const auto key = eval::metric_key(m, k);
            if (report.per_query.contains(key)) {
                keys.push_back(key);
            }
        }
    }
    // metrics not produced by evaluate_run (hand-built reports)
    for (const auto& [key, values] : report.per_query) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            keys.push_back(key);
        }
    }
    return keys;
}

void require_same_queries(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
                          const std::string& system, const std::string& metric) {
    bool same = a.size() == b.size();
    for (auto i = a.begin(), j = b.begin(); same && i != a.end(); ++i, ++j) {
        same = i->first == j->first;
    }
    if (!same) {
        throw DataError("report '" + system + "' covers a different query set than the baseline for " + metric);
    }
}

}  // namespace

SignificanceTable compare_reports(std::span<const eval::MetricReport> reports, const std::string& baseline_tag,
                                  const WilcoxonOptions& options) {
    std::set<std::string> tags;
    const eval::MetricReport* baseline = nullptr;
    for (const auto& r : reports) {
        if (!tags.insert(r.tag).second) {
            throw ConfigError("duplicate report tag '" + r.tag + "'");
        }
        if (r.tag == baseline_tag) {
            baseline = &r;
        }
    }
    if (baseline == nullptr) {
        throw ConfigError("no report is tagged with baseline '" + baseline_tag + "'");
    }

    SignificanceTable table;
    table.baseline = baseline_tag;
    table.metrics = metric_order(*baseline);
    table.systems.push_back(baseline_tag);
    for (const auto& r : reports) {
        if (&r != baseline) {
            table.systems.push_back(r.tag);
        }
    }
    for (const auto& metric : table.metrics) {
        table.means[baseline_tag][metric] = baseline->aggregate.at(metric);
    }

    for (const auto& r : reports) {
        if (&r == baseline) {
            continue;
        }
        for (const auto& metric : table.metrics) {
            const auto it = r.per_query.find(metric);
            if (it == r.per_query.end()) {
                throw DataError("report '" + r.tag + "' lacks metric " + metric);
            }
            const auto& base_values = baseline->per_query.at(metric);
            require_same_queries(base_values, it->second, r.tag, metric);

            PairedSample sample{base_values, it->second};
            ComparisonCell cell;
            cell.system = r.tag;
            cell.metric = metric;
            cell.baseline_mean = baseline->aggregate.at(metric);
            const auto agg = r.aggregate.find(metric);
            if (agg == r.aggregate.end()) {
                throw DataError("report '" + r.tag + "' lacks the aggregate for " + metric);
            }
            cell.candidate_mean = agg->second;
            try {
                cell.t_test = paired_t_test(sample);
            } catch (const InvalidArgument& e) {
                throw DataError("report '" + r.tag + "', " + metric + ": " + e.what());
            }
            try {
                cell.wilcoxon = wilcoxon_signed_rank(sample, options);
            } catch (const InvalidArgument& e) {
                cell.wilcoxon_error = e.what();
            }
            table.means[r.tag][metric] = cell.candidate_mean;
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

namespace {

json result_json(const SignificanceResult& r) {
    json j = {{"test", std::string(to_string(r.test))},
              {"p_value", r.p_value},
              {"n_effective", r.n_effective},
              {"marker", std::string(to_string(r.marker))},
              {"degenerate", r.degenerate}};
    // JSON has no infinity
    if (std::isfinite(r.statistic)) {
        j["statistic"] = r.statistic;
    } else {
        j["statistic"] = r.statistic > 0 ? "inf" : "-inf";
    }
    if (r.test == TestKind::wilcoxon) {
        j["exact"] = r.exact;
    }
    return j;
}

std::string superscript(Marker m) {
    switch (m) {
        case Marker::alpha:
            return "ᵅ";
        case Marker::beta:
            return "ᵝ";
        case Marker::none:
            break;
    }
    return "";
}

}  // namespace

std::string significance_to_json(const SignificanceTable& table) {
    json cells = json::array();
    for (const auto& c : table.cells) {
        json cell = {{"system", c.system},
                     {"metric", c.metric},
                     {"baseline_mean", c.baseline_mean},
                     {"candidate_mean", c.candidate_mean},
                     {"paired_t", result_json(c.t_test)}};
        if (c.wilcoxon) {
            cell["wilcoxon"] = result_json(*c.wilcoxon);
        } else {
            cell["wilcoxon"] = {{"test", "wilcoxon"}, {"p_value", nullptr}, {"error", c.wilcoxon_error}};
        }
        cells.push_back(std::move(cell));
    }
    const json root = {{"baseline", table.baseline},
                       {"metrics", table.metrics},
                       {"systems", table.systems},
                       {"means", table.means},
                       {"comparisons", std::move(cells)}};
    return root.dump(2) + "\n";
}

std::string format_significance_table(const SignificanceTable& table) {
    std::size_t name_width = 8;
    for (const auto& s : table.systems) {
        name_width = std::max(name_width, s.size() + 2);
    }
    constexpr int kCell = 14;

    auto block = [&](std::ostringstream& out, TestKind test) {
        out << (test == TestKind::paired_t ? "Paired t-test" : "Wilcoxon signed-rank") << " vs " << table.baseline
            << "  (ᵅ p<0.05, ᵝ p<0.01)\n";
        out << std::left << std::setw(static_cast<int>(name_width)) << "system";
        for (const auto& m : table.metrics) {
            out << std::right << std::setw(kCell) << m;
        }
        out << '\n';
        for (const auto& system : table.systems) {
            out << std::left << std::setw(static_cast<int>(name_width)) << system;
            for (const auto& m : table.metrics) {
                std::ostringstream value;
                value << std::fixed << std::setprecision(4) << table.means.at(system).at(m);
                std::string marker;
                if (const auto* cell = table.find(system, m)) {
                    if (test == TestKind::paired_t) {
                        marker = superscript(cell->t_test.marker);
                    } else if (cell->wilcoxon) {
                        marker = superscript(cell->wilcoxon->marker);
                    }
                }
                // superscripts are one column wide but three bytes long
                const int pad = kCell - static_cast<int>(value.str().size()) - (marker.empty() ? 0 : 1);
                out << std::string(static_cast<std::size_t>(std::max(pad, 1)), ' ') << value.str() << marker;
            }
            out << '\n';
        }
    };

    std::ostringstream out;
    block(out, TestKind::paired_t);
    out << '\n';
    block(out, TestKind::wilcoxon);
    return out.str();
}

}  // namespace faqir::stats
