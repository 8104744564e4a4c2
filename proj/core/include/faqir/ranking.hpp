#pragma once

#include <string>
#include <vector>

namespace faqir {

struct ScoredDoc {
    std::string id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Ranked list for one query, best first.
using Ranking = std::vector<ScoredDoc>;

/// Ordering shared by every retriever: score descending, ties by ascending id.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.id < b.id;
}

/// Shortest decimal text that parses back to exactly `score`.
std::string format_score(double score);

}  // namespace faqir
