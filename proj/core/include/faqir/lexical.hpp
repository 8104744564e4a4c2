#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/ranking.hpp"
#include "faqir/text.hpp"

namespace faqir::lexical {

struct BM25Params {
    double k1 = 1.2;  ///< term-frequency saturation, >= 0
    double b = 0.75;  ///< length normalization, in [0, 1]

    void validate() const;
};

/// ln((N - df + 0.5) / (df + 0.5) + 1); strictly positive for 1 <= df <= N.
double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

/// tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl)).
double bm25_tf_weight(const BM25Params& params, double tf, double doc_length, double avg_doc_length);

struct Posting {
    std::uint32_t doc;  ///< position in doc_ids()
    std::uint32_t tf;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Term -> postings index with the statistics BM25 needs. Built by a single
/// writer; const member functions are safe to call concurrently.
class InvertedIndex {
public:
    explicit InvertedIndex(BM25Params params = {});

    /// Analyzes every document text with the text module and indexes it.
    /// Throws DataError for an empty corpus.
    static InvertedIndex build(const Corpus& corpus, const BM25Params& params = {});

    /// Appends one pre-tokenized document, updating N, df and avgdl.
    void add_document(const std::string& id, std::span<const std::string> tokens);

    [[nodiscard]] const BM25Params& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    [[nodiscard]] std::size_t vocabulary_size() const noexcept { return terms_.size(); }
    [[nodiscard]] double avg_doc_length() const noexcept;
    [[nodiscard]] const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    [[nodiscard]] bool contains_doc(const std::string& id) const { return doc_pos_.contains(id); }

    /// Throws InvalidArgument for an unknown id.
    [[nodiscard]] std::size_t doc_length(const std::string& id) const;
    [[nodiscard]] std::size_t doc_freq(const std::string& term) const;
    [[nodiscard]] std::size_t term_freq(const std::string& term, const std::string& doc_id) const;
    [[nodiscard]] std::span<const Posting> postings(const std::string& term) const;
    [[nodiscard]] std::vector<std::string> terms() const;

    /// Sum over query tokens of idf * tf weight. Tokens absent from the
    /// document or the index contribute 0. Throws InvalidArgument for an
    /// unknown document id.
    [[nodiscard]] double score(std::span<const std::string> query_tokens, const std::string& doc_id) const;

    /// Top-k documents with a positive score, best first, ties by id.
    [[nodiscard]] Ranking search_tokens(std::span<const std::string> query_tokens, std::size_t k) const;

    /// Analyzes `query_text` the same way documents were analyzed.
    [[nodiscard]] Ranking search(std::string_view query_text, std::size_t k) const;

    void write(std::ostream& out) const;
    static InvertedIndex read(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b);

private:
    [[nodiscard]] std::uint32_t doc_position(const std::string& id) const;
    [[nodiscard]] double term_score(std::uint32_t term, std::uint32_t doc, std::uint32_t tf) const;

    BM25Params params_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_pos_;
    std::vector<std::uint32_t> doc_len_;
    std::uint64_t total_length_ = 0;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> term_ids_;
    std::vector<std::vector<Posting>> postings_;
};

inline constexpr std::string_view kIndexFormat = "faqir-bm25-index";
inline constexpr int kIndexVersion = 1;

}  // namespace faqir::lexical
