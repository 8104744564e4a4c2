#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

#include "faqir/dense.hpp"
#include "faqir/error.hpp"
#include "faqir/hybrid.hpp"
#include "faqir/lexical.hpp"
#include "faqir/ranking.hpp"

namespace faqir {

enum class SearchMode { bm25, dense, hybrid };

std::string_view to_string(SearchMode mode);
/// Throws ConfigError for anything but "bm25", "dense" or "hybrid".
SearchMode search_mode_from_string(std::string_view name);

/// Requested retrieval mode lacks a loaded source (no index or no vectors).
class ModeUnavailable : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Read-only view over the loaded retrieval sources; one instance serves the
/// CLI and the HTTP service so both return identical results.
class Searcher {
public:
    Searcher(std::shared_ptr<const lexical::InvertedIndex> index, std::shared_ptr<const dense::VectorStore> vectors,
             std::shared_ptr<const dense::EmbeddingProvider> embedder, hybrid::FusionConfig fusion = {});

    [[nodiscard]] bool has_lexical() const noexcept { return index_ != nullptr; }
    [[nodiscard]] bool has_dense() const noexcept { return vectors_ != nullptr && embedder_ != nullptr; }
    [[nodiscard]] const lexical::InvertedIndex* index() const noexcept { return index_.get(); }
    [[nodiscard]] const dense::VectorStore* vectors() const noexcept { return vectors_.get(); }
    [[nodiscard]] const hybrid::FusionConfig& fusion() const noexcept { return fusion_; }

    /// Top-k for `query`. Hybrid fuses the top `fusion().depth` of each side
    /// and truncates to k. Throws ModeUnavailable when a needed source is
    /// missing and InvalidArgument for k == 0.
    [[nodiscard]] Ranking search(std::string_view query, std::size_t k, SearchMode mode) const;

    [[nodiscard]] Ranking search_lexical(std::string_view query, std::size_t k) const;
    [[nodiscard]] Ranking search_dense(std::string_view query, std::size_t k) const;

private:
    std::shared_ptr<const lexical::InvertedIndex> index_;
    std::shared_ptr<const dense::VectorStore> vectors_;
    std::shared_ptr<const dense::EmbeddingProvider> embedder_;
    hybrid::FusionConfig fusion_;
};

}  // namespace faqir
