#include "faqir/searcher.hpp"

#include <string>

#include "faqir/text.hpp"

namespace faqir {

std::string_view to_string(SearchMode mode) {
    switch (mode) {
        case SearchMode::bm25:
            return "bm25";
        case SearchMode::dense:
            return "dense";
        case SearchMode::hybrid:
            return "hybrid";
    }
    return "unknown";
}

SearchMode search_mode_from_string(std::string_view name) {
    if (name == "bm25") {
        return SearchMode::bm25;
    }
    if (name == "dense") {
        return SearchMode::dense;
    }
    if (name == "hybrid") {
        return SearchMode::hybrid;
    }
    throw ConfigError("unknown search mode '" + std::string(name) + "' (expected bm25, dense or hybrid)");
}

Searcher::Searcher(std::shared_ptr<const lexical::InvertedIndex> index, std::shared_ptr<const dense::VectorStore> vectors,
                   std::shared_ptr<const dense::EmbeddingProvider> embedder, hybrid::FusionConfig fusion)
    : index_(std::move(index)), vectors_(std::move(vectors)), embedder_(std::move(embedder)), fusion_(fusion) {
    fusion_.validate();
    if (vectors_ && embedder_ && vectors_->dim() != embedder_->dim()) {
        throw ConfigError("vector store dim " + std::to_string(vectors_->dim()) + " does not match embedder dim " +
                          std::to_string(embedder_->dim()));
    }
}

Ranking Searcher::search_lexical(std::string_view query, std::size_t k) const {
    if (!has_lexical()) {
        throw ModeUnavailable("bm25 retrieval needs an index");
    }
    return index_->search(query, k);
}

Ranking Searcher::search_dense(std::string_view query, std::size_t k) const {
    if (!has_dense()) {
        throw ModeUnavailable("dense retrieval needs a vector store and an embedding provider");
    }
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    // no direction to search along
    if (text::analyze(query).empty()) {
        return {};
    }
    const auto vec = embedder_->embed_one(std::string(query), dense::TextKind::query);
    return dense::dense_search(*vectors_, vec, k);
}

Ranking Searcher::search(std::string_view query, std::size_t k, SearchMode mode) const {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    switch (mode) {
        case SearchMode::bm25:
            return search_lexical(query, k);
        case SearchMode::dense:
            return search_dense(query, k);
        case SearchMode::hybrid: {
            if (!has_lexical() || !has_dense()) {
                throw ModeUnavailable("hybrid retrieval needs both an index and vectors");
            }
            auto fused = hybrid::fuse_rankings(search_lexical(query, fusion_.depth), search_dense(query, fusion_.depth),
                                               fusion_);
            if (fused.size() > k) {
                fused.resize(k);
            }
            return fused;
        }
    }
    return {};
}

}  // namespace faqir
