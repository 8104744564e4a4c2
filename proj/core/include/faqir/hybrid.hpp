#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "faqir/eval.hpp"
#include "faqir/ranking.hpp"

namespace faqir::hybrid {

enum class FusionMethod {
    weighted_minmax,  ///< alpha * dense_norm + (1 - alpha) * lexical_norm
    rrf,              ///< sum of 1 / (rrf_k + rank)
};

std::string_view to_string(FusionMethod method);
FusionMethod fusion_method_from_string(std::string_view name);

struct FusionConfig {
    FusionMethod method = FusionMethod::weighted_minmax;
    double alpha = 0.5;       ///< weight on the dense side, weighted_minmax only
    std::size_t rrf_k = 60;   ///< rrf only
    std::size_t depth = 100;  ///< candidates taken from the top of each input

    void validate() const;
};

/// Fuses one query's lexical and dense rankings over the union of their
/// top-`depth` candidates. For weighted_minmax each side is min-max scaled
/// over its own candidates (a constant side maps to 1) and a document absent
/// from a side gets 0 from it. Output is sorted by fused score, ties by id.
Ranking fuse_rankings(const Ranking& lexical, const Ranking& dense, const FusionConfig& config);

/// Applies fuse_rankings to every query present in either run; a query
/// missing from one run fuses against an empty ranking.
eval::Run fuse(const eval::Run& lexical, const eval::Run& dense, const FusionConfig& config,
               std::string tag = "hybrid");

}  // namespace faqir::hybrid
