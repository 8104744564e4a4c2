#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "faqir/corpus.hpp"
#include "faqir/dense.hpp"
#include "faqir/error.hpp"
#include "oracles.hpp"

using namespace faqir;

namespace {

Corpus corpus_from(const std::string& jsonl) {
    std::istringstream in(jsonl);
    return read_corpus(in);
}

QrelLoadResult qrels_from(const std::string& tsv, const Corpus* corpus = nullptr, const QuerySet* queries = nullptr,
                          RelevanceMode mode = RelevanceMode::binary) {
    std::istringstream in(tsv);
    return read_qrels(in, corpus, queries, mode);
}

std::vector<QAPair> numbered_pairs(std::size_t n) {
    std::vector<QAPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back({"question " + std::to_string(i), "answer " + std::to_string(i)});
    }
    return pairs;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LoadCorpus, TwoDocuments) {
    const auto c = corpus_from(R"({"_id":"d1","text":"राहदानी"})"
                               "\n"
                               R"({"_id":"d2","text":"फारम","title":"t"})"
                               "\n");
    ASSERT_EQ(c.size(), 2U);
    EXPECT_EQ(c[1].title.value_or(""), "t");
    EXPECT_FALSE(c[0].title.has_value());
}

TEST(LoadCorpus, DuplicateIdIsRejected) {
    EXPECT_THROW(corpus_from("{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d1\",\"text\":\"b\"}\n"), DataError);
}

TEST(LoadCorpus, MissingTextNamesTheLine) {
    const auto msg = error_of([] { corpus_from("{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d2\"}\n"); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("text"), std::string::npos) << msg;
}

TEST(LoadCorpus, MalformedJsonAndEmptyText) {
    EXPECT_THROW(corpus_from("{\"_id\":\"d1\",\"text\":\n"), DataError);
    EXPECT_THROW(corpus_from("[1,2]\n"), DataError);
    EXPECT_THROW(corpus_from("{\"_id\":\"d1\",\"text\":\"<p> </p>\"}\n"), DataError);
    EXPECT_THROW(corpus_from("{\"_id\":\"\",\"text\":\"a\"}\n"), DataError);
    EXPECT_THROW(corpus_from("{\"_id\":5,\"text\":\"a\"}\n"), DataError);
}

TEST(LoadCorpus, BlankLinesAndCrlfAreTolerated) {
    const auto c = corpus_from("{\"_id\":\"d1\",\"text\":\"a\"}\r\n\r\n{\"_id\":\"d2\",\"text\":\"b\"}\r\n");
    EXPECT_EQ(c.size(), 2U);
}

TEST(LoadCorpus, MissingFileIsDataError) {
    EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), DataError);
}

TEST(LoadCorpus, SerializationIsContentIdempotent) {
    const std::string canonical = "{\"_id\":\"d1\",\"text\":\"राहदानी कहाँ\"}\n{\"_id\":\"d2\",\"text\":\"b\",\"title\":\"T\"}\n";
    // Different key order and spacing, same content.
    const auto c = corpus_from("{ \"text\": \"राहदानी कहाँ\", \"_id\": \"d1\" }\n{\"title\":\"T\",\"_id\":\"d2\",\"text\":\"b\"}\n");
    std::ostringstream once;
    write_corpus(once, c);
    EXPECT_EQ(once.str(), canonical);
    std::ostringstream twice;
    write_corpus(twice, corpus_from(once.str()));
    EXPECT_EQ(twice.str(), once.str());
}

TEST(LoadQueries, RoundTrip) {
    std::istringstream in("{\"_id\":\"q1\",\"text\":\"कति दिन\"}\n");
    const auto q = read_queries(in);
    ASSERT_EQ(q.size(), 1U);
    std::ostringstream out;
    write_queries(out, q);
    std::istringstream again(out.str());
    EXPECT_EQ(read_queries(again)[0].text, "कति दिन");
}

TEST(LoadQrels, KnownIds) {
    const auto c = corpus_from("{\"_id\":\"d1\",\"text\":\"a\"}\n");
    std::istringstream qin("{\"_id\":\"q1\",\"text\":\"a\"}\n");
    const auto q = read_queries(qin);
    const auto r = qrels_from("query-id\tcorpus-id\tscore\nq1\td1\t1\n", &c, &q);
    EXPECT_TRUE(r.qrels.is_relevant("q1", "d1"));
    EXPECT_EQ(r.qrels.query_count(), 1U);
    EXPECT_EQ(r.qrels.relevant_count("q1"), 1U);
}

TEST(LoadQrels, UnknownDocumentIsNamed) {
    const auto c = corpus_from("{\"_id\":\"d1\",\"text\":\"a\"}\n");
    std::istringstream qin("{\"_id\":\"q1\",\"text\":\"a\"}\n");
    const auto q = read_queries(qin);
    const auto msg = error_of([&] { qrels_from("query-id\tcorpus-id\tscore\nq1\tdX\t1\n", &c, &q); });
    EXPECT_NE(msg.find("dX"), std::string::npos) << msg;
}

TEST(LoadQrels, HeaderAndGrades) {
    EXPECT_THROW(qrels_from("q1\td1\t1\n"), DataError);
    EXPECT_THROW(qrels_from("query-id\tcorpus-id\tscore\nq1\td1\tx\n"), DataError);
    EXPECT_THROW(qrels_from("query-id\tcorpus-id\tscore\nq1\td1\t-1\n"), DataError);
    EXPECT_THROW(qrels_from("query-id\tcorpus-id\tscore\nq1\td1\t2\n"), DataError);
    EXPECT_THROW(qrels_from(""), DataError);
    const auto graded = qrels_from("query-id\tcorpus-id\tscore\nq1\td1\t2\n", nullptr, nullptr, RelevanceMode::graded);
    EXPECT_TRUE(graded.qrels.is_relevant("q1", "d1"));
}

TEST(LoadQrels, GradeZeroRowsAreDroppedWithWarning) {
    const auto r = qrels_from("query-id\tcorpus-id\tscore\nq1\td1\t0\nq1\td2\t1\n");
    EXPECT_FALSE(r.qrels.is_relevant("q1", "d1"));
    EXPECT_TRUE(r.qrels.is_relevant("q1", "d2"));
    EXPECT_EQ(r.warnings.size(), 1U);
}

TEST(QrelSet, AverageRelevantPerQuery) {
    QrelSet qrels;
    for (int q = 0; q < 82; ++q) {
        for (int d = 0; d < 10; ++d) {
            qrels.add("q" + std::to_string(q), "q" + std::to_string(q) + "-a" + std::to_string(d), 1);
        }
    }
    EXPECT_EQ(qrels.query_count(), 82U);
    EXPECT_EQ(qrels.judgment_count(), 820U);
    EXPECT_DOUBLE_EQ(qrels.mean_relevant_per_query(), 10.0);
    EXPECT_THROW(qrels.add("q", "d", 0), InvalidArgument);
}

TEST(SplitPairs, SeventyFifteenFifteenOf548) {
    const auto pairs = numbered_pairs(548);
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 12345ULL}) {
        SplitSpec spec;
        spec.seed = seed;
        const auto s = split_pairs(pairs, spec);
        EXPECT_EQ(s.train.size(), 384U);
        EXPECT_EQ(s.val.size(), 82U);
        EXPECT_EQ(s.test.size(), 82U);
    }
}

TEST(SplitPairs, DeterministicForFixedSeed) {
    const auto pairs = numbered_pairs(10);
    const SplitSpec spec{0.8, 0.1, 0.1, 99};
    const auto a = split_pairs(pairs, spec);
    const auto b = split_pairs(pairs, spec);
    auto texts = [](const std::vector<QAPair>& v) {
        std::vector<std::string> out;
        for (const auto& p : v) {
            out.push_back(p.query_text);
        }
        return out;
    };
    EXPECT_EQ(texts(a.train), texts(b.train));
    EXPECT_EQ(texts(a.val), texts(b.val));
    EXPECT_EQ(texts(a.test), texts(b.test));
    EXPECT_EQ(a.train.size(), 8U);
}

TEST(SplitPairs, InvalidFractions) {
    const auto pairs = numbered_pairs(10);
    EXPECT_THROW(split_pairs(pairs, SplitSpec{0.5, 0.5, 0.5, 0}), ConfigError);
    EXPECT_THROW(split_pairs(pairs, SplitSpec{1.2, -0.1, -0.1, 0}), ConfigError);
    EXPECT_THROW(split_pairs(numbered_pairs(2), SplitSpec{}), InvalidArgument);
}

TEST(SplitPairs, IsAPartitionForAnySeed) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 200;
        const auto pairs = numbered_pairs(n);
        SplitSpec spec;
        spec.seed = rng();
        const auto s = split_pairs(pairs, spec);
        std::multiset<std::string> seen;
        for (const auto* part : {&s.train, &s.val, &s.test}) {
            for (const auto& p : *part) {
                seen.insert(p.query_text);
            }
        }
        ASSERT_EQ(seen.size(), n);
        for (const auto& p : pairs) {
            ASSERT_EQ(seen.count(p.query_text), 1U);
        }
    }
}

TEST(NearDuplicates, IdenticalTextsAreFlagged) {
    const dense::MockEmbedder embedder(256);
    const std::vector<std::string> texts = {"राहदानी कहाँ बन्छ", "शुल्क कति", "राहदानी कहाँ बन्छ"};
    const auto found = find_near_duplicates(texts, embedder, 0.99);
    ASSERT_EQ(found.size(), 1U);
    EXPECT_EQ(found[0].first, 0U);
    EXPECT_EQ(found[0].second, 2U);
    EXPECT_NEAR(found[0].similarity, 1.0, 1e-6);
}

TEST(NearDuplicates, DisjointSupportIsNotFlagged) {
    const std::size_t dim = 4096;
    const std::vector<std::string> texts = {"राहदानी कहाँ", "शुल्क कति"};
    // The chosen words land in distinct buckets, so the vectors have disjoint support.
    std::set<std::size_t> buckets;
    for (const auto* w : {"राहदानी", "कहाँ", "शुल्क", "कति"}) {
        buckets.insert(dense::token_bucket(w, dim));
    }
    ASSERT_EQ(buckets.size(), 4U);
    const dense::MockEmbedder embedder(dim);
    EXPECT_TRUE(find_near_duplicates(texts, embedder, 0.5).empty());
}

TEST(NearDuplicates, SingleTextAndBadThreshold) {
    const dense::MockEmbedder embedder(64);
    const std::vector<std::string> one = {"a"};
    EXPECT_TRUE(find_near_duplicates(one, embedder, 0.9).empty());
    EXPECT_THROW(find_near_duplicates(one, embedder, 0.0), InvalidArgument);
    EXPECT_THROW(find_near_duplicates(one, embedder, 1.5), InvalidArgument);
}

TEST(NearDuplicates, MonotoneInThreshold) {
    const dense::MockEmbedder embedder(32);
    std::mt19937_64 rng(8);
    const std::vector<std::string> words = {"क", "ख", "ग", "घ", "ङ", "च"};
    std::vector<std::string> texts;
    for (int i = 0; i < 40; ++i) {
        std::string t;
        for (int w = 0; w < 3; ++w) {
            t += words[rng() % words.size()] + " ";
        }
        texts.push_back(t);
    }
    std::set<std::pair<std::size_t, std::size_t>> previous;
    bool first = true;
    for (double threshold = 0.1; threshold <= 1.0; threshold += 0.1) {
        std::set<std::pair<std::size_t, std::size_t>> current;
        for (const auto& d : find_near_duplicates(texts, embedder, threshold)) {
            ASSERT_LT(d.first, d.second);
            current.insert({d.first, d.second});
        }
        if (!first) {
            ASSERT_TRUE(std::includes(previous.begin(), previous.end(), current.begin(), current.end()));
        }
        previous = current;
        first = false;
    }
}

TEST(BuildEvalCorpus, SizesAreAdditive) {
    std::vector<Document> relevant;
    for (int i = 0; i < 820; ++i) {
        relevant.push_back({"r" + std::to_string(i), "text", std::nullopt, Provenance::unspecified});
    }
    std::vector<Document> distractors;
    for (int i = 0; i < 36193; ++i) {
        distractors.push_back({"r" + std::to_string(i), "text", std::nullopt, Provenance::unspecified});
    }
    const auto merged = build_eval_corpus(Corpus(relevant), Corpus(distractors));
    EXPECT_EQ(merged.size(), 37013U);
    EXPECT_TRUE(merged.contains("dx-r0"));
    EXPECT_EQ(merged.find("dx-r0")->provenance, Provenance::distractor);
    EXPECT_EQ(merged.find("r0")->provenance, Provenance::relevant);

    const auto only = build_eval_corpus(Corpus(std::vector<Document>(relevant.begin(), relevant.begin() + 10)),
                                        Corpus{});
    EXPECT_EQ(only.size(), 10U);
}

TEST(BuildEvalCorpus, CollisionWithoutPrefix) {
    const Corpus a(std::vector<Document>{{"d1", "x", std::nullopt, Provenance::unspecified}});
    EXPECT_THROW(build_eval_corpus(a, a, DistractorIds::keep), DataError);
    EXPECT_EQ(build_eval_corpus(a, a).size(), 2U);
}

TEST(Pairs, RoundTrip) {
    oracle::TempDir dir;
    const auto pairs = numbered_pairs(4);
    save_pairs(dir / "p.jsonl", pairs);
    const auto back = load_pairs(dir / "p.jsonl");
    ASSERT_EQ(back.size(), 4U);
    EXPECT_EQ(back[3].positive_text, "answer 3");
}
