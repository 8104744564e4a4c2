#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "faqir/error.hpp"

namespace faqir {

namespace dense {
class EmbeddingProvider;
}

/// Where a document of an evaluation corpus came from.
enum class Provenance { unspecified, relevant, distractor };

struct Document {
    std::string id;
    std::string text;
    std::optional<std::string> title;
    Provenance provenance = Provenance::unspecified;
};

struct Query {
    std::string id;
    std::string text;
};

/// A user question and the answer that resolves it.
struct QAPair {
    std::string query_text;
    std::string positive_text;
};

/// Ordered collection of records with unique, non-empty ids. Immutable once
/// built, so it can be shared freely between threads.
template <typename Record>
class IdCollection {
public:
    IdCollection() = default;

    explicit IdCollection(std::vector<Record> records) : records_(std::move(records)) {
        index_.reserve(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& id = records_[i].id;
            if (id.empty()) {
                throw DataError("record " + std::to_string(i) + " has an empty id");
            }
            if (!index_.emplace(id, i).second) {
                throw DataError("duplicate id '" + id + "'");
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const Record& operator[](std::size_t i) const { return records_[i]; }
    [[nodiscard]] auto begin() const noexcept { return records_.begin(); }
    [[nodiscard]] auto end() const noexcept { return records_.end(); }
    [[nodiscard]] std::span<const Record> records() const noexcept { return records_; }

    [[nodiscard]] bool contains(const std::string& id) const { return index_.contains(id); }

    [[nodiscard]] const Record* find(const std::string& id) const {
        const auto it = index_.find(id);
        return it == index_.end() ? nullptr : &records_[it->second];
    }

    [[nodiscard]] std::optional<std::size_t> position(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

private:
    std::vector<Record> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

using Corpus = IdCollection<Document>;
using QuerySet = IdCollection<Query>;

/// Binary (or graded) relevance judgments: query id -> document id -> grade.
/// Only grades >= 1 are stored.
class QrelSet {
public:
    using Judgments = std::map<std::string, int>;

    void add(const std::string& query_id, const std::string& doc_id, int grade);

    [[nodiscard]] const Judgments* find(const std::string& query_id) const;
    [[nodiscard]] bool contains(const std::string& query_id) const { return judgments_.contains(query_id); }
    [[nodiscard]] bool is_relevant(const std::string& query_id, const std::string& doc_id) const;
    [[nodiscard]] std::size_t relevant_count(const std::string& query_id) const;
    [[nodiscard]] std::size_t query_count() const noexcept { return judgments_.size(); }
    [[nodiscard]] std::size_t judgment_count() const noexcept;
    [[nodiscard]] double mean_relevant_per_query() const;
    [[nodiscard]] std::vector<std::string> query_ids() const;
    [[nodiscard]] const std::map<std::string, Judgments>& all() const noexcept { return judgments_; }

private:
    std::map<std::string, Judgments> judgments_;
};

enum class RelevanceMode { binary, graded };

struct QrelLoadResult {
    QrelSet qrels;
    std::vector<std::string> warnings;  ///< one entry per dropped grade-0 row
};

// --- file formats -----------------------------------------------------------
// corpus:  JSON lines {"_id", "text", "title"?}
// queries: JSON lines {"_id", "text"}
// qrels:   TSV with header "query-id\tcorpus-id\tscore"
// pairs:   JSON lines {"query", "positive"}

Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

QuerySet read_queries(std::istream& in);
QuerySet load_queries(const std::filesystem::path& path);
void write_queries(std::ostream& out, const QuerySet& queries);
void save_queries(const std::filesystem::path& path, const QuerySet& queries);

/// Parses qrels; when corpus/queries are given every id must resolve.
QrelLoadResult read_qrels(std::istream& in, const Corpus* corpus, const QuerySet* queries,
                          RelevanceMode mode = RelevanceMode::binary);
QrelLoadResult load_qrels(const std::filesystem::path& path, const Corpus& corpus, const QuerySet& queries,
                          RelevanceMode mode = RelevanceMode::binary);
QrelLoadResult load_qrels(const std::filesystem::path& path, RelevanceMode mode = RelevanceMode::binary);
void write_qrels(std::ostream& out, const QrelSet& qrels);
void save_qrels(const std::filesystem::path& path, const QrelSet& qrels);

std::vector<QAPair> read_pairs(std::istream& in);
std::vector<QAPair> load_pairs(const std::filesystem::path& path);
void write_pairs(std::ostream& out, std::span<const QAPair> pairs);
void save_pairs(const std::filesystem::path& path, std::span<const QAPair> pairs);

// --- splitting ----------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 0;

    /// Throws ConfigError unless each fraction is in [0,1] and they sum to 1.
    void validate() const;
};

struct PairSplit {
    std::vector<QAPair> train;
    std::vector<QAPair> val;
    std::vector<QAPair> test;
};

/// Seeded shuffle then partition. Validation and test sizes are
/// floor(n * fraction); the remainder goes to training.
PairSplit split_pairs(std::span<const QAPair> pairs, const SplitSpec& spec);

// --- deduplication --------------------------------------------------------

struct DuplicateCandidate {
    std::size_t first;
    std::size_t second;  ///< always > first
    double similarity;
};

/// Every unordered pair whose embedding cosine is >= threshold, sorted by
/// similarity descending then by index. Meant for manual review; nothing is
/// removed.
std::vector<DuplicateCandidate> find_near_duplicates(std::span<const std::string> texts,
                                                     const dense::EmbeddingProvider& embedder, double threshold);

// --- evaluation corpus assembly ---------------------------------------------

inline constexpr std::string_view kDistractorPrefix = "dx-";

enum class DistractorIds {
    prefix,  ///< prepend kDistractorPrefix to every distractor id
    keep,    ///< keep ids as-is
};

/// Relevant documents followed by distractors, provenance recorded per
/// document. Throws DataError on an id collision.
Corpus build_eval_corpus(const Corpus& relevant, const Corpus& distractors,
                         DistractorIds ids = DistractorIds::prefix);

}  // namespace faqir
