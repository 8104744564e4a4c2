#include "faqir/hybrid.hpp"

#include <algorithm>
#include <unordered_map>

#include "faqir/error.hpp"

namespace faqir::hybrid {

std::string_view to_string(FusionMethod method) {
    return method == FusionMethod::rrf ? "rrf" : "weighted_minmax";
}

FusionMethod fusion_method_from_string(std::string_view name) {
    if (name == "weighted_minmax") {
        return FusionMethod::weighted_minmax;
    }
    if (name == "rrf") {
        return FusionMethod::rrf;
    }
    throw ConfigError("unknown fusion method '" + std::string(name) + "'");
}

void FusionConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("fusion alpha must lie in [0, 1]");
    }
    if (rrf_k < 1) {
        throw ConfigError("rrf_k must be at least 1");
    }
    if (depth < 1) {
        throw ConfigError("fusion depth must be at least 1");
    }
}

namespace {

std::span<const ScoredDoc> head(const Ranking& ranking, std::size_t depth) {
    return std::span<const ScoredDoc>(ranking).first(std::min(depth, ranking.size()));
}

void add_minmax(std::span<const ScoredDoc> side, double weight, std::unordered_map<std::string, double>& fused) {
    if (side.empty()) {
        return;
    }
    const auto [lo, hi] = std::minmax_element(side.begin(), side.end(),
                                              [](const ScoredDoc& a, const ScoredDoc& b) { return a.score < b.score; });
    const double range = hi->score - lo->score;
    for (const auto& d : side) {
        const double norm = range > 0.0 ? (d.score - lo->score) / range : 1.0;
        fused[d.id] += weight * norm;
    }
}

void add_rrf(std::span<const ScoredDoc> side, std::size_t rrf_k, std::unordered_map<std::string, double>& fused) {
    for (std::size_t i = 0; i < side.size(); ++i) {
        fused[side[i].id] += 1.0 / static_cast<double>(rrf_k + i + 1);
    }
}

}  // namespace

Ranking fuse_rankings(const Ranking& lexical, const Ranking& dense, const FusionConfig& config) {
    config.validate();
    const auto lex = head(lexical, config.depth);
    const auto den = head(dense, config.depth);

    std::unordered_map<std::string, double> fused;
    // every candidate gets an entry, even with a 0 contribution
    for (const auto& d : lex) {
        fused.try_emplace(d.id, 0.0);
    }
    for (const auto& d : den) {
        fused.try_emplace(d.id, 0.0);
    }
    if (config.method == FusionMethod::weighted_minmax) {
        add_minmax(lex, 1.0 - config.alpha, fused);
        add_minmax(den, config.alpha, fused);
    } else {
        add_rrf(lex, config.rrf_k, fused);
        add_rrf(den, config.rrf_k, fused);
    }
    Ranking out;
    out.reserve(fused.size());
    for (auto& [id, score] : fused) {
        out.push_back({id, score});
    }
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
}

eval::Run fuse(const eval::Run& lexical, const eval::Run& dense, const FusionConfig& config, std::string tag) {
    config.validate();
    static const Ranking kEmpty;
    eval::Run out;
    out.tag = std::move(tag);
    auto ranking_of = [](const eval::Run& run, const std::string& qid) -> const Ranking& {
        const auto it = run.rankings.find(qid);
        return it == run.rankings.end() ? kEmpty : it->second;
    };
    for (const auto& [qid, ranking] : lexical.rankings) {
        out.rankings[qid] = fuse_rankings(ranking, ranking_of(dense, qid), config);
    }
    for (const auto& [qid, ranking] : dense.rankings) {
        if (!out.rankings.contains(qid)) {
            out.rankings[qid] = fuse_rankings(kEmpty, ranking, config);
        }
    }
    return out;
}

}  // namespace faqir::hybrid
