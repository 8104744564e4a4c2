#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faqir/eval.hpp"
#include "faqir/stats.hpp"

namespace faqir::stats {

/// Both paired tests for one (system, metric) against the baseline.
struct ComparisonCell {
    std::string system;
    std::string metric;
    double baseline_mean = 0.0;
    double candidate_mean = 0.0;
    SignificanceResult t_test;
    std::optional<SignificanceResult> wilcoxon;  ///< empty when every difference is zero
    std::string wilcoxon_error;
};

struct SignificanceTable {
    std::string baseline;
    std::vector<std::string> metrics;  ///< report metric keys, in report order
    std::vector<std::string> systems;  ///< baseline first, then candidates in input order
    std::map<std::string, std::map<std::string, double>> means;  ///< system -> metric -> mean
    std::vector<ComparisonCell> cells;

    [[nodiscard]] const ComparisonCell* find(const std::string& system, const std::string& metric) const;
};

/// Runs both tests on every metric's per-query vector of every non-baseline
/// report. Throws ConfigError if no report carries `baseline_tag` (or tags
/// repeat) and DataError if reports disagree on metrics or query sets.
SignificanceTable compare_reports(std::span<const eval::MetricReport> reports, const std::string& baseline_tag,
                                  const WilcoxonOptions& options = {});

std::string significance_to_json(const SignificanceTable& table);

/// Aligned text with one block per test; cells carry ᵅ (p < 0.05) or
/// ᵝ (p < 0.01) superscripts.
std::string format_significance_table(const SignificanceTable& table);

}  // namespace faqir::stats
