#include "faqir/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "faqir/error.hpp"
#include "io_util.hpp"

namespace faqir::pipeline {

namespace {

constexpr std::size_t kMaxCore = 5;
constexpr std::size_t kMinCore = 3;
constexpr std::size_t kQuestionWords = 12;
constexpr std::size_t kMinFiller = 24;
constexpr std::size_t kMinDistractorVocab = 24;

// consonants U+0915..U+0939, optionally followed by a dependent vowel sign
constexpr char32_t kVowelSigns[] = {0, 0x093E, 0x093F, 0x0940, 0x0941, 0x0942, 0x0947, 0x0948, 0x094B, 0x094C};
constexpr std::size_t kConsonants = 0x0939 - 0x0915 + 1;
constexpr std::size_t kSyllables = kConsonants * std::size(kVowelSigns);

void append_utf8(std::string& out, char32_t c) {
    if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

std::string padded(const char* prefix, std::size_t i, std::size_t width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, static_cast<int>(width), i);
    return buf;
}

std::size_t digits(std::size_t n) {
    std::size_t d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

struct Vocabulary {
    std::size_t core_begin;
    std::size_t synonym_begin;
    std::size_t question_begin;
    std::size_t filler_begin;
    std::size_t filler_size;
    std::size_t distractor_begin;
    std::size_t distractor_size;
};

Vocabulary partition(const SyntheticSpec& spec) {
    const std::size_t core = spec.n_queries * kMaxCore;
    const std::size_t fixed = 2 * core + kQuestionWords;
    if (spec.vocabulary_size < fixed + kMinFiller + kMinDistractorVocab) {
        throw ConfigError("vocabulary_size " + std::to_string(spec.vocabulary_size) + " too small: need at least " +
                          std::to_string(fixed + kMinFiller + kMinDistractorVocab) + " for " +
                          std::to_string(spec.n_queries) + " disjoint query cores, synonyms and distractors");
    }
    const std::size_t rest = spec.vocabulary_size - fixed;
    Vocabulary v{};
    v.core_begin = 0;
    v.synonym_begin = core;
    v.question_begin = 2 * core;
    v.filler_begin = fixed;
    v.filler_size = std::max(kMinFiller, rest / 3);
    v.distractor_begin = v.filler_begin + v.filler_size;
    v.distractor_size = spec.vocabulary_size - v.distractor_begin;
    return v;
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += w;
    }
    return out;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_queries == 0 || relevant_per_query == 0 || vocabulary_size == 0) {
        throw ConfigError("synthetic counts must be positive");
    }
    if (!(paraphrase_noise >= 0.0 && paraphrase_noise <= 1.0)) {
        throw ConfigError("paraphrase_noise must lie in [0, 1]");
    }
}

std::string synthetic_word(std::size_t index) {
    // offset so that every word has at least two syllables
    std::size_t n = index + kSyllables;
    std::vector<std::size_t> syllables;
    while (n > 0) {
        syllables.push_back(n % kSyllables);
        n /= kSyllables;
    }
    std::string out;
    for (auto it = syllables.rbegin(); it != syllables.rend(); ++it) {
        append_utf8(out, static_cast<char32_t>(0x0915 + *it / std::size(kVowelSigns)));
        if (const char32_t sign = kVowelSigns[*it % std::size(kVowelSigns)]; sign != 0) {
            append_utf8(out, sign);
        }
    }
    return out;
}

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto vocab = partition(spec);
    detail::Rng rng(seed);

    const std::size_t qwidth = digits(spec.n_queries);
    const std::size_t awidth = digits(spec.relevant_per_query);
    const std::size_t dwidth = digits(spec.n_distractors);

    SyntheticDataset data;
    std::vector<Query> queries;
    std::vector<Document> relevant;
    std::vector<std::pair<std::string, std::string>> judgments;

    for (std::size_t qi = 0; qi < spec.n_queries; ++qi) {
        const std::size_t core_size = kMinCore + rng.below(kMaxCore - kMinCore + 1);
        std::vector<std::string> core;
        std::vector<std::string> synonyms;
        for (std::size_t c = 0; c < core_size; ++c) {
            core.push_back(synthetic_word(vocab.core_begin + qi * kMaxCore + c));
            synonyms.push_back(synthetic_word(vocab.synonym_begin + qi * kMaxCore + c));
            data.synonyms[synonyms.back()] = core.back();
        }
        const std::string question_word = synthetic_word(vocab.question_begin + rng.below(kQuestionWords));

        std::vector<std::string> query_words;
        for (std::size_t c = 0; c < core_size; ++c) {
            query_words.push_back(rng.bernoulli(spec.paraphrase_noise) ? synonyms[c] : core[c]);
        }
        query_words.push_back(question_word);
        rng.shuffle(query_words);
        const std::string qid = padded("q", qi + 1, qwidth);
        queries.push_back({qid, join(query_words)});

        for (std::size_t a = 0; a < spec.relevant_per_query; ++a) {
            std::vector<std::string> words;
            for (const auto& token : core) {
                if (!rng.bernoulli(spec.paraphrase_noise / 2.0)) {
                    words.push_back(token);
                }
            }
            if (words.empty()) {
                words.push_back(core[rng.below(core.size())]);
            }
            words.push_back(question_word);
            const std::size_t fillers = 6 + rng.below(7);
            for (std::size_t f = 0; f < fillers; ++f) {
                words.push_back(synthetic_word(vocab.filler_begin + rng.below(vocab.filler_size)));
            }
            rng.shuffle(words);
            Document doc;
            doc.id = qid + "-a" + padded("", a + 1, awidth);
            doc.text = join(words);
            judgments.emplace_back(qid, doc.id);
            relevant.push_back(std::move(doc));
        }
    }

    std::vector<Document> distractors;
    distractors.reserve(spec.n_distractors);
    for (std::size_t d = 0; d < spec.n_distractors; ++d) {
        const std::size_t length = 6 + rng.below(9);
        std::vector<std::string> words;
        for (std::size_t w = 0; w < length; ++w) {
            words.push_back(synthetic_word(vocab.distractor_begin + rng.below(vocab.distractor_size)));
        }
        Document doc;
        doc.id = padded("d", d + 1, dwidth);
        doc.text = join(words);
        distractors.push_back(std::move(doc));
    }

    data.corpus = build_eval_corpus(Corpus(std::move(relevant)), Corpus(std::move(distractors)));
    data.queries = QuerySet(std::move(queries));
    for (const auto& [q, d] : judgments) {
        data.qrels.add(q, d, 1);
    }
    return data;
}

void save_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset) {
    std::filesystem::create_directories(dir);
    save_corpus(dir / "corpus.jsonl", dataset.corpus);
    save_queries(dir / "queries.jsonl", dataset.queries);
    save_qrels(dir / "qrels.tsv", dataset.qrels);
    dense::save_synonyms(dir / "synonyms.tsv", dataset.synonyms);
}

}  // namespace faqir::pipeline
