#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include "faqir/dense.hpp"

namespace faqir::dense {

/// Client for an embedding server speaking
///   POST /embed {"texts": [...], "kind": "query"|"passage"}
///   -> {"dim": int, "vectors": [[...], ...]}
/// Texts are sent in batches of `batch_size`. A fresh connection is opened
/// per call, so one instance may be shared between threads.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    RemoteEmbedder(std::string endpoint, std::size_t dim, std::size_t batch_size = 64,
                   std::chrono::seconds timeout = std::chrono::seconds(60));

    [[nodiscard]] std::size_t dim() const override { return dim_; }
    [[nodiscard]] const std::string& endpoint() const noexcept { return endpoint_; }

protected:
    std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts, TextKind kind) const override;

private:
    std::string endpoint_;
    std::size_t dim_;
    std::size_t batch_size_;
    std::chrono::seconds timeout_;
};

}  // namespace faqir::dense
