#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace faqir::stats {

enum class TestKind { paired_t, wilcoxon };

/// Table marker: beta for p < 0.01, alpha for p < 0.05.
enum class Marker { none, alpha, beta };

std::string_view to_string(TestKind test);
std::string_view to_string(Marker marker);

/// Throws InvalidArgument unless 0 <= p <= 1.
Marker mark_significance(double p);

/// Per-query values of a baseline and a candidate system over the same queries.
struct PairedSample {
    std::map<std::string, double> baseline;
    std::map<std::string, double> candidate;

    /// Throws InvalidArgument unless both sides cover the same query ids and n >= 2.
    void validate() const;

    /// candidate - baseline, in query-id order.
    [[nodiscard]] std::vector<double> differences() const;
};

struct SignificanceResult {
    TestKind test = TestKind::paired_t;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_effective = 0;
    Marker marker = Marker::none;
    /// Set when the sample has zero spread but a nonzero mean difference.
    bool degenerate = false;
    /// Wilcoxon only: whether p came from the exact null distribution.
    bool exact = false;
};

// --- distributions ------------------------------------------------------------

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

double normal_cdf(double z);

// --- tests --------------------------------------------------------------------

/// Paired t-test on the differences, two-sided, n - 1 degrees of freedom.
/// All-zero differences give t = 0, p = 1; zero spread with a nonzero mean
/// gives p = 0 and sets `degenerate`.
SignificanceResult paired_t_test(std::span<const double> differences);
SignificanceResult paired_t_test(const PairedSample& sample);

struct WilcoxonOptions {
    /// Exact null distribution up to this many nonzero differences, normal
    /// approximation above it.
    std::size_t exact_cutoff = 25;
};

/// Signed-rank test: zero differences dropped, tied |d| get mean ranks,
/// W = min(W+, W-), two-sided p. Throws InvalidArgument when every
/// difference is zero.
SignificanceResult wilcoxon_signed_rank(std::span<const double> differences, const WilcoxonOptions& options = {});
SignificanceResult wilcoxon_signed_rank(const PairedSample& sample, const WilcoxonOptions& options = {});

/// Mean ranks of |d| (ascending, 1-based) for the nonzero differences.
std::vector<double> signed_rank_magnitudes(std::span<const double> nonzero_differences);

}  // namespace faqir::stats
