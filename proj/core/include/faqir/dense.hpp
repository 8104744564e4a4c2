#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/ranking.hpp"

namespace faqir::dense {

/// Fixed-length vector of finite components.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    /// Throws InvalidArgument on an empty or non-finite input.
    explicit EmbeddingVector(std::vector<float> values);

    [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const float> values() const noexcept { return values_; }
    [[nodiscard]] float operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double norm() const;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<float> values_;
};

double dot(std::span<const float> a, std::span<const float> b);
double l2_norm(std::span<const float> v);

/// (a.b)/(|a||b|) clamped to [-1, 1]. Throws InvalidArgument on a dimension
/// mismatch or an all-zero operand.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Unit-length copy. Throws InvalidArgument for the zero vector.
EmbeddingVector l2_normalized(const EmbeddingVector& v);

/// Embedding table keyed by id, stored row-major in one buffer. When
/// `normalized` every row has unit norm (within 1e-6 for in-memory inserts).
/// Populated by a single writer; const access is thread-safe.
class VectorStore {
public:
    static constexpr double kUnitNormTolerance = 1e-6;

    VectorStore(std::size_t dim, bool normalized);

    /// Throws InvalidArgument on dim mismatch, duplicate id, or (when
    /// normalized) a vector whose norm is off by more than `norm_tolerance`.
    void add(std::string id, const EmbeddingVector& vector, double norm_tolerance = kUnitNormTolerance);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] bool normalized() const noexcept { return normalized_; }
    [[nodiscard]] bool contains(const std::string& id) const { return rows_.contains(id); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const;
    [[nodiscard]] double row_norm(std::size_t i) const { return norms_[i]; }
    [[nodiscard]] std::optional<EmbeddingVector> get(const std::string& id) const;

private:
    std::size_t dim_;
    bool normalized_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> rows_;
    std::vector<float> data_;
    std::vector<double> norms_;
};

/// Exhaustive top-k by cosine similarity; ties by ascending id.
Ranking dense_search(const VectorStore& store, const EmbeddingVector& query, std::size_t k);

struct MnrlConfig {
    double scale = 20.0;
};

/// Multiple-negatives ranking loss: mean cross-entropy of each query's
/// scaled cosine logits against all in-batch positives, the matching
/// positive being the target.
double mnrl_loss(std::span<const EmbeddingVector> queries, std::span<const EmbeddingVector> positives,
                 const MnrlConfig& config = {});

// --- embedding providers ------------------------------------------------------

enum class TextKind { query, passage };

std::string_view to_string(TextKind kind);

/// Turns texts into vectors. Prefixes are prepended before embedding.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    [[nodiscard]] virtual std::size_t dim() const = 0;

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts, TextKind kind) const;
    EmbeddingVector embed_one(const std::string& text, TextKind kind) const;

    void set_prefixes(std::string query_prefix, std::string passage_prefix);

protected:
    virtual std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts, TextKind kind) const = 0;

private:
    std::string query_prefix_;
    std::string passage_prefix_;
};

/// Maps surface tokens onto canonical tokens before hashing.
using SynonymTable = std::unordered_map<std::string, std::string>;

/// TSV lines "variant<TAB>canonical".
SynonymTable load_synonyms(const std::filesystem::path& path);
void save_synonyms(const std::filesystem::path& path, const SynonymTable& table);

/// Bucket index of a token in [0, dim).
std::size_t token_bucket(std::string_view token, std::size_t dim);

/// Deterministic bag-of-hashed-tokens embedding: each token of the analyzed
/// text adds one to its bucket, and the result is L2-normalized. Throws
/// InvalidArgument if dim < 8 or the text has no tokens.
EmbeddingVector mock_embed(std::string_view text, std::size_t dim, const SynonymTable* synonyms = nullptr);

class MockEmbedder final : public EmbeddingProvider {
public:
    explicit MockEmbedder(std::size_t dim, SynonymTable synonyms = {});

    [[nodiscard]] std::size_t dim() const override { return dim_; }

protected:
    std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts, TextKind kind) const override;

private:
    std::size_t dim_;
    SynonymTable synonyms_;
};

enum class ProviderKind { mock, file, remote };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view name);

struct EmbeddingProviderSpec {
    ProviderKind kind = ProviderKind::mock;
    std::size_t dim = 256;
    std::optional<std::string> model_name;
    std::string query_prefix;
    std::string passage_prefix;
    std::string endpoint;                  ///< remote: base URL, e.g. http://127.0.0.1:8088
    std::filesystem::path synonyms;        ///< mock: optional synonym table
};

/// Builds a mock or remote provider. A file provider has no text encoder and
/// yields InvalidArgument here.
std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec);

// --- vector files -----------------------------------------------------------
// Line 1: {"dim", "count", "normalized", "model"}; then {"_id", "vector"} per line.

inline constexpr double kImportNormTolerance = 1e-4;

/// expected_dim == 0 accepts whatever the header declares.
VectorStore read_vectors(std::istream& in, std::size_t expected_dim = 0);
VectorStore import_vectors(const std::filesystem::path& path, std::size_t expected_dim = 0);
void write_vectors(std::ostream& out, const VectorStore& store, std::string_view model);
void save_vectors(const std::filesystem::path& path, const VectorStore& store, std::string_view model);

/// Embeds `texts` and stores them under `ids`, L2-normalized.
VectorStore embed_to_store(const EmbeddingProvider& provider, std::span<const std::string> ids,
                           std::span<const std::string> texts, TextKind kind);

}  // namespace faqir::dense
