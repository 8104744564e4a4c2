#include "faqir/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "faqir/error.hpp"

namespace faqir::stats {

std::string_view to_string(TestKind test) { return test == TestKind::paired_t ? "paired_t" : "wilcoxon"; }

std::string_view to_string(Marker marker) {
    switch (marker) {
        case Marker::alpha:
            return "alpha";
        case Marker::beta:
            return "beta";
        case Marker::none:
            break;
    }
    return "none";
}

Marker mark_significance(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("p-value must lie in [0, 1]");
    }
    if (p < 0.01) {
        return Marker::beta;
    }
    if (p < 0.05) {
        return Marker::alpha;
    }
    return Marker::none;
}

void PairedSample::validate() const {
    if (baseline.size() != candidate.size()) {
        throw InvalidArgument("paired sample sides cover different query sets");
    }
    for (auto b = baseline.begin(), c = candidate.begin(); b != baseline.end(); ++b, ++c) {
        if (b->first != c->first) {
            throw InvalidArgument("paired sample sides cover different query sets (first mismatch: '" + b->first +
                                  "' vs '" + c->first + "')");
        }
    }
    if (baseline.size() < 2) {
        throw InvalidArgument("a paired test needs at least 2 pairs");
    }
}

std::vector<double> PairedSample::differences() const {
    validate();
    std::vector<double> d;
    d.reserve(baseline.size());
    for (auto b = baseline.begin(), c = candidate.begin(); b != baseline.end(); ++b, ++c) {
        d.push_back(c->second - b->second);
    }
    return d;
}

// --- distributions ------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return h;
        }
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) {
        throw InvalidArgument("incomplete beta needs a, b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidArgument("incomplete beta needs x in [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x == 1.0) {
        return 1.0;
    }
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw InvalidArgument("degrees of freedom must be positive");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    const double x = df / (df + t * t);
    return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// --- paired t -----------------------------------------------------------------

SignificanceResult paired_t_test(std::span<const double> differences) {
    const std::size_t n = differences.size();
    if (n < 2) {
        throw InvalidArgument("a paired t-test needs at least 2 pairs");
    }
    SignificanceResult result;
    result.test = TestKind::paired_t;
    result.n_effective = n;

    const double mean = std::accumulate(differences.begin(), differences.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (const double d : differences) {
        ss += (d - mean) * (d - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const bool all_zero = std::all_of(differences.begin(), differences.end(), [](double d) { return d == 0.0; });

    if (all_zero) {
        result.statistic = 0.0;
        result.p_value = 1.0;
    } else if (sd == 0.0) {
        result.statistic = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
        result.p_value = 0.0;
        result.degenerate = true;
    } else {
        result.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
        result.p_value = student_t_two_sided_p(result.statistic, static_cast<double>(n - 1));
    }
    result.marker = mark_significance(result.p_value);
    return result;
}

SignificanceResult paired_t_test(const PairedSample& sample) { return paired_t_test(sample.differences()); }

// --- Wilcoxon -----------------------------------------------------------------

std::vector<double> signed_rank_magnitudes(std::span<const double> nonzero_differences) {
    const std::size_t n = nonzero_differences.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(nonzero_differences[a]) < std::abs(nonzero_differences[b]);
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        const double magnitude = std::abs(nonzero_differences[order[i]]);
        while (j + 1 < n && std::abs(nonzero_differences[order[j + 1]]) == magnitude) {
            ++j;
        }
        // positions i..j (0-based) share the mean of ranks i+1..j+1
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = mean_rank;
        }
        i = j + 1;
    }
    return ranks;
}

namespace {

// Two-sided exact p: share of the 2^n sign assignments whose min(W+, W-)
// is at most the observed W. Ranks are multiples of 1/2, so the W+
// distribution is counted over doubled integer ranks.
double wilcoxon_exact_p(std::span<const double> ranks, double w) {
    std::vector<long> doubled;
    doubled.reserve(ranks.size());
    long total = 0;
    for (const double r : ranks) {
        doubled.push_back(std::lround(2.0 * r));
        total += doubled.back();
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (const long r : doubled) {
        for (long s = reach; s >= 0; --s) {
            if (counts[static_cast<std::size_t>(s)] != 0.0) {
                counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
            }
        }
        reach += r;
    }
    const long observed = std::lround(2.0 * w);
    double hits = 0.0;
    for (long s = 0; s <= total; ++s) {
        if (std::min(s, total - s) <= observed) {
            hits += counts[static_cast<std::size_t>(s)];
        }
    }
    const double patterns = std::ldexp(1.0, static_cast<int>(ranks.size()));
    return std::min(1.0, hits / patterns);
}

double wilcoxon_normal_p(std::span<const double> nonzero, std::span<const double> ranks, double w) {
    const auto n = static_cast<double>(ranks.size());
    std::vector<double> magnitudes;
    magnitudes.reserve(nonzero.size());
    for (const double d : nonzero) {
        magnitudes.push_back(std::abs(d));
    }
    std::sort(magnitudes.begin(), magnitudes.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < magnitudes.size();) {
        std::size_t j = i;
        while (j < magnitudes.size() && magnitudes[j] == magnitudes[i]) {
            ++j;
        }
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double sigma = std::sqrt(variance);
    const double z = (w - n * (n + 1.0) / 4.0 + 0.5) / sigma;
    return std::min(1.0, 2.0 * normal_cdf(z));
}

}  // namespace

SignificanceResult wilcoxon_signed_rank(std::span<const double> differences, const WilcoxonOptions& options) {
    std::vector<double> nonzero;
    nonzero.reserve(differences.size());
    for (const double d : differences) {
        if (d != 0.0) {
            nonzero.push_back(d);
        }
    }
    if (nonzero.empty()) {
        throw InvalidArgument("no nonzero differences");
    }
    const auto ranks = signed_rank_magnitudes(nonzero);
    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        (nonzero[i] > 0.0 ? w_plus : w_minus) += ranks[i];
    }
    SignificanceResult result;
    result.test = TestKind::wilcoxon;
    result.statistic = std::min(w_plus, w_minus);
    result.n_effective = nonzero.size();
    result.exact = nonzero.size() <= options.exact_cutoff;
    result.p_value = result.exact ? wilcoxon_exact_p(ranks, result.statistic)
                                  : wilcoxon_normal_p(nonzero, ranks, result.statistic);
    result.marker = mark_significance(result.p_value);
    return result;
}

SignificanceResult wilcoxon_signed_rank(const PairedSample& sample, const WilcoxonOptions& options) {
    return wilcoxon_signed_rank(sample.differences(), options);
}

}  // namespace faqir::stats
