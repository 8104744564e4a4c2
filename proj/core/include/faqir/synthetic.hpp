#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "faqir/corpus.hpp"
#include "faqir/dense.hpp"

namespace faqir::pipeline {

/// Shape of a generated FAQ test collection.
struct SyntheticSpec {
    std::size_t n_queries = 82;
    std::size_t relevant_per_query = 10;
    std::size_t n_distractors = 2000;
    std::size_t vocabulary_size = 5000;
    /// Probability that a query core token is replaced by its synonym; answers
    /// also drop each core token with half this probability.
    double paraphrase_noise = 0.2;

    void validate() const;
};

/// Generated corpus, queries and binary qrels, plus the synonym table that
/// maps every paraphrase token back to its core token.
struct SyntheticDataset {
    Corpus corpus;
    QuerySet queries;
    QrelSet qrels;
    dense::SynonymTable synonyms;
};

/// Each query owns a disjoint core of 3-5 tokens and one shared question
/// word; its answers contain the core (subject to noise), the question word
/// and filler tokens. Distractors use a disjoint vocabulary region.
/// Deterministic in `seed`. Throws ConfigError when the vocabulary is too
/// small for the disjoint regions.
SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed);

/// Writes corpus.jsonl, queries.jsonl, qrels.tsv and synonyms.tsv.
void save_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset);

/// Devanagari pseudo-word for a vocabulary index; distinct indices give
/// distinct words.
std::string synthetic_word(std::size_t index);

}  // namespace faqir::pipeline
