#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "faqir/dense.hpp"
#include "faqir/error.hpp"
#include "oracles.hpp"

using namespace faqir;
using dense::EmbeddingVector;
using dense::VectorStore;

namespace {

EmbeddingVector vec(std::vector<float> v) { return EmbeddingVector(std::move(v)); }

std::vector<float> random_floats(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<float> g(0.0F, 1.0F);
    std::vector<float> v(dim);
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

std::vector<double> as_double(const EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

VectorStore read_from(const std::string& text, std::size_t expected_dim = 0) {
    std::istringstream in(text);
    return dense::read_vectors(in, expected_dim);
}

}  // namespace

TEST(EmbeddingVector, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(vec({}), InvalidArgument);
    EXPECT_THROW(vec({1.0F, NAN}), InvalidArgument);
    EXPECT_THROW(vec({INFINITY}), InvalidArgument);
}

TEST(Cosine, Examples) {
    EXPECT_DOUBLE_EQ(dense::cosine_similarity(vec({1, 0}), vec({0, 1})), 0.0);
    EXPECT_NEAR(dense::cosine_similarity(vec({0.3F, -2.0F, 5.0F}), vec({0.3F, -2.0F, 5.0F})), 1.0, 1e-12);
    EXPECT_NEAR(dense::cosine_similarity(vec({1, 1}), vec({1, 0})), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(1.0 / std::sqrt(2.0), 0.70711, 1e-5);
}

TEST(Cosine, Errors) {
    EXPECT_THROW(dense::cosine_similarity(vec({1, 0}), vec({1, 0, 0})), InvalidArgument);
    EXPECT_THROW(dense::cosine_similarity(vec({0, 0}), vec({1, 0})), InvalidArgument);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<float> scale(0.01F, 100.0F);
    for (int i = 0; i < 500; ++i) {
        const std::size_t dim = 1 + rng() % 64;
        const auto a = random_floats(rng, dim);
        const auto b = random_floats(rng, dim);
        const double base = dense::cosine_similarity(vec(a), vec(b));
        ASSERT_NEAR(base, dense::cosine_similarity(vec(b), vec(a)), 1e-12);
        auto sa = a;
        auto sb = b;
        const float alpha = scale(rng);
        const float beta = scale(rng);
        std::transform(sa.begin(), sa.end(), sa.begin(), [&](float x) { return x * alpha; });
        std::transform(sb.begin(), sb.end(), sb.begin(), [&](float x) { return x * beta; });
        ASSERT_NEAR(base, dense::cosine_similarity(vec(sa), vec(sb)), 1e-6);
        ASSERT_GE(base, -1.0);
        ASSERT_LE(base, 1.0);
    }
}

TEST(MockEmbed, DeterministicAndUnitNorm) {
    const auto a = dense::mock_embed("राहदानी कहाँ बन्छ", 256);
    const auto b = dense::mock_embed("राहदानी कहाँ बन्छ", 256);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a.norm(), 1.0, 1e-6);
    std::mt19937_64 rng(32);
    const std::vector<std::string> words = {"क", "ख", "ग", "mrp", "२०८०", "फारम", "शुल्क"};
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (std::size_t w = 0, n = 1 + rng() % 10; w < n; ++w) {
            text += words[rng() % words.size()] + " ";
        }
        ASSERT_NEAR(dense::mock_embed(text, 8 + rng() % 300).norm(), 1.0, 1e-6);
    }
}

TEST(MockEmbed, DisjointBucketsGiveZeroCosine) {
    const std::size_t dim = 1024;
    std::set<std::size_t> left;
    std::set<std::size_t> right;
    for (const auto* w : {"राहदानी", "नवीकरण"}) {
        left.insert(dense::token_bucket(w, dim));
    }
    for (const auto* w : {"शुल्क", "कति"}) {
        right.insert(dense::token_bucket(w, dim));
    }
    std::vector<std::size_t> common;
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(common));
    ASSERT_TRUE(common.empty()) << "chosen words collide at this dim";
    const auto a = dense::mock_embed("राहदानी नवीकरण", dim);
    const auto b = dense::mock_embed("शुल्क कति", dim);
    EXPECT_DOUBLE_EQ(oracle::cosine(as_double(a), as_double(b)), 0.0);
    EXPECT_DOUBLE_EQ(dense::cosine_similarity(a, b), 0.0);
}

TEST(MockEmbed, SynonymsCanonicalizeTokens) {
    const dense::SynonymTable synonyms{{"पासपोर्ट", "राहदानी"}};
    const auto a = dense::mock_embed("पासपोर्ट कहाँ", 128, &synonyms);
    const auto b = dense::mock_embed("राहदानी कहाँ", 128);
    EXPECT_EQ(a, b);
    EXPECT_NE(dense::mock_embed("पासपोर्ट कहाँ", 128), b);
}

TEST(MockEmbed, Errors) {
    EXPECT_THROW(dense::mock_embed("a", 4), InvalidArgument);
    EXPECT_THROW(dense::mock_embed("  ?? ", 64), InvalidArgument);
}

TEST(MockEmbedder, AppliesPrefixes) {
    dense::MockEmbedder embedder(64);
    embedder.set_prefixes("query: ", "passage: ");
    EXPECT_EQ(embedder.embed_one("x", dense::TextKind::query), dense::mock_embed("query: x", 64));
    EXPECT_EQ(embedder.embed_one("x", dense::TextKind::passage), dense::mock_embed("passage: x", 64));
}

TEST(VectorStore, AddValidation) {
    VectorStore store(2, true);
    store.add("d1", vec({1, 0}));
    EXPECT_THROW(store.add("d1", vec({0, 1})), InvalidArgument);
    EXPECT_THROW(store.add("d2", vec({1, 0, 0})), InvalidArgument);
    EXPECT_THROW(store.add("d3", vec({0.5F, 0})), InvalidArgument);
    EXPECT_EQ(store.size(), 1U);
    VectorStore raw(2, false);
    EXPECT_NO_THROW(raw.add("d3", vec({0.5F, 0})));
}

TEST(DenseSearch, Examples) {
    VectorStore store(2, true);
    store.add("d1", vec({1, 0}));
    store.add("d2", vec({0, 1}));
    const auto top = dense::dense_search(store, vec({1, 0}), 1);
    ASSERT_EQ(top.size(), 1U);
    EXPECT_EQ(top[0].id, "d1");
    EXPECT_DOUBLE_EQ(top[0].score, 1.0);
    EXPECT_EQ(dense::dense_search(store, vec({1, 0}), 10).size(), 2U);
}

TEST(DenseSearch, MatchesExhaustiveScan) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t dim = 8 + rng() % 56;
        VectorStore store(dim, false);
        std::vector<std::pair<std::string, std::vector<double>>> rows;
        for (int i = 0; i < 500; ++i) {
            const auto v = random_floats(rng, dim);
            const auto id = "v" + std::to_string(i);
            store.add(id, vec(v));
            rows.emplace_back(id, std::vector<double>(v.begin(), v.end()));
        }
        for (int q = 0; q < 10; ++q) {
            const auto qv = random_floats(rng, dim);
            const std::vector<double> qd(qv.begin(), qv.end());
            std::vector<std::pair<std::string, double>> expected;
            for (const auto& [id, row] : rows) {
                expected.emplace_back(id, oracle::cosine(qd, row));
            }
            std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second > b.second : a.first < b.first;
            });
            const auto got = dense::dense_search(store, vec(qv), 50);
            ASSERT_EQ(got.size(), 50U);
            for (std::size_t i = 0; i < got.size(); ++i) {
                ASSERT_EQ(got[i].id, expected[i].first);
                ASSERT_NEAR(got[i].score, expected[i].second, 1e-9);
            }
        }
    }
}

TEST(DenseSearch, InvariantUnderPositiveRescaling) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<float> scale(0.1F, 10.0F);
    VectorStore a(16, false);
    VectorStore b(16, false);
    for (int i = 0; i < 200; ++i) {
        auto v = random_floats(rng, 16);
        a.add("v" + std::to_string(i), vec(v));
        const float s = scale(rng);
        for (auto& x : v) {
            x *= s;
        }
        b.add("v" + std::to_string(i), vec(v));
    }
    for (int q = 0; q < 20; ++q) {
        const auto qv = vec(random_floats(rng, 16));
        const auto ra = dense::dense_search(a, qv, 200);
        const auto rb = dense::dense_search(b, qv, 200);
        for (std::size_t i = 0; i < ra.size(); ++i) {
            // Rescaling perturbs cosines at float precision, so only
            // well-separated neighbours must keep their order.
            if (i + 1 < ra.size() && ra[i].score - ra[i + 1].score > 1e-6 && (i == 0 || ra[i - 1].score - ra[i].score > 1e-6)) {
                ASSERT_EQ(ra[i].id, rb[i].id);
            }
        }
    }
}

TEST(Mnrl, SingleItemBatchIsZero) {
    const std::vector<EmbeddingVector> q{vec({0.3F, 0.4F})};
    const std::vector<EmbeddingVector> p{vec({-1.0F, 2.0F})};
    EXPECT_EQ(dense::mnrl_loss(q, p), 0.0);
}

TEST(Mnrl, HandComputedTwoByTwo) {
    const std::vector<EmbeddingVector> q{vec({1, 0}), vec({0, 1})};
    EXPECT_NEAR(dense::mnrl_loss(q, q, {1.0}), std::log(1.0 + std::exp(-1.0)), 1e-12);
    EXPECT_NEAR(std::log(1.0 + std::exp(-1.0)), 0.31326, 1e-5);
}

TEST(Mnrl, IdenticalVectorsGiveLogB) {
    for (std::size_t b : {2U, 3U, 7U, 64U}) {
        const std::vector<EmbeddingVector> q(b, vec({0.2F, 0.9F, -0.1F}));
        for (double s : {1.0, 20.0, 50.0}) {
            ASSERT_NEAR(dense::mnrl_loss(q, q, {s}), std::log(static_cast<double>(b)), 1e-9);
        }
    }
}

TEST(Mnrl, MatchesMaterializedSoftmax) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t b = 1 + rng() % 64;
        const std::size_t dim = 1 + rng() % 128;
        const double scale = 0.5 + (rng() % 400) / 10.0;
        std::vector<EmbeddingVector> q;
        std::vector<EmbeddingVector> p;
        std::vector<std::vector<double>> qd;
        std::vector<std::vector<double>> pd;
        for (std::size_t i = 0; i < b; ++i) {
            q.push_back(vec(random_floats(rng, dim)));
            p.push_back(vec(random_floats(rng, dim)));
            qd.push_back(as_double(q.back()));
            pd.push_back(as_double(p.back()));
        }
        const double loss = dense::mnrl_loss(q, p, {scale});
        ASSERT_NEAR(loss, oracle::mnrl(qd, pd, scale), 1e-9);
        ASSERT_GE(loss, 0.0);
        if (b >= 2) {
            ASSERT_GT(loss, 0.0);
        }
    }
}

TEST(Mnrl, PermutationEquivariant) {
    std::mt19937_64 rng(36);
    std::vector<EmbeddingVector> q;
    std::vector<EmbeddingVector> p;
    for (int i = 0; i < 16; ++i) {
        q.push_back(vec(random_floats(rng, 12)));
        p.push_back(vec(random_floats(rng, 12)));
    }
    std::vector<std::size_t> order(16);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<EmbeddingVector> qp;
    std::vector<EmbeddingVector> pp;
    for (auto i : order) {
        qp.push_back(q[i]);
        pp.push_back(p[i]);
    }
    EXPECT_NEAR(dense::mnrl_loss(q, p), dense::mnrl_loss(qp, pp), 1e-12);
}

TEST(Mnrl, Errors) {
    const std::vector<EmbeddingVector> one{vec({1, 0})};
    const std::vector<EmbeddingVector> two{vec({1, 0}), vec({0, 1})};
    EXPECT_THROW(dense::mnrl_loss(one, two), InvalidArgument);
    EXPECT_THROW(dense::mnrl_loss(std::vector<EmbeddingVector>{}, std::vector<EmbeddingVector>{}), InvalidArgument);
    EXPECT_THROW(dense::mnrl_loss(one, one, {0.0}), InvalidArgument);
}

TEST(VectorFile, ThreeWellFormedRecords) {
    const auto store = read_from(
        "{\"dim\":4,\"count\":3,\"normalized\":true,\"model\":\"m\"}\n"
        "{\"_id\":\"a\",\"vector\":[1,0,0,0]}\n"
        "{\"_id\":\"b\",\"vector\":[0,1,0,0]}\n"
        "{\"_id\":\"c\",\"vector\":[0,0,0.6,0.8]}\n");
    EXPECT_EQ(store.size(), 3U);
    EXPECT_EQ(store.dim(), 4U);
}

TEST(VectorFile, ShortRecordNamesItsId) {
    const auto msg = error_of([] {
        read_from("{\"dim\":4,\"count\":1,\"normalized\":false,\"model\":\"m\"}\n{\"_id\":\"bad-one\",\"vector\":[1,2,3]}\n");
    });
    EXPECT_NE(msg.find("bad-one"), std::string::npos) << msg;
}

TEST(VectorFile, NormViolationAndHeaderChecks) {
    EXPECT_THROW(read_from("{\"dim\":2,\"count\":1,\"normalized\":true,\"model\":\"m\"}\n{\"_id\":\"a\",\"vector\":[0.5,0]}\n"),
                 DataError);
    EXPECT_THROW(read_from("{\"dim\":2,\"count\":2,\"normalized\":false,\"model\":\"m\"}\n{\"_id\":\"a\",\"vector\":[1,0]}\n"),
                 DataError);
    EXPECT_THROW(read_from("{\"dim\":2,\"count\":1,\"normalized\":false,\"model\":\"m\"}\n{\"_id\":\"a\",\"vector\":[1,0]}\n", 3),
                 DataError);
    EXPECT_THROW(read_from(""), DataError);
    EXPECT_THROW(read_from("{\"dim\":2}\n"), DataError);
    // within the import tolerance
    EXPECT_NO_THROW(read_from("{\"dim\":2,\"count\":1,\"normalized\":true,\"model\":\"m\"}\n{\"_id\":\"a\",\"vector\":[1.00005,0]}\n"));
}

TEST(VectorFile, RoundTripPreservesValues) {
    std::mt19937_64 rng(37);
    VectorStore store(24, true);
    for (int i = 0; i < 50; ++i) {
        store.add("v" + std::to_string(i), dense::l2_normalized(vec(random_floats(rng, 24))));
    }
    oracle::TempDir dir;
    dense::save_vectors(dir / "v.jsonl", store, "mock");
    const auto header = nlohmann::json::parse(oracle::read_file(dir / "v.jsonl").substr(0, oracle::read_file(dir / "v.jsonl").find('\n')));
    EXPECT_EQ(header.at("count"), 50);
    EXPECT_EQ(header.at("model"), "mock");
    const auto back = dense::import_vectors(dir / "v.jsonl", 24);
    ASSERT_EQ(back.size(), store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        ASSERT_EQ(back.ids()[i], store.ids()[i]);
        const auto a = store.row(i);
        const auto b = back.row(i);
        for (std::size_t j = 0; j < a.size(); ++j) {
            ASSERT_EQ(a[j], b[j]);
        }
    }
}

TEST(Providers, Factory) {
    dense::EmbeddingProviderSpec spec;
    spec.dim = 32;
    EXPECT_EQ(dense::make_provider(spec)->dim(), 32U);
    spec.kind = dense::ProviderKind::file;
    EXPECT_THROW(dense::make_provider(spec), InvalidArgument);
    EXPECT_EQ(dense::provider_kind_from_string("remote"), dense::ProviderKind::remote);
    EXPECT_THROW(dense::provider_kind_from_string("gpu"), ConfigError);
}

TEST(Providers, EmbedToStoreNormalizes) {
    const dense::MockEmbedder embedder(32);
    const std::vector<std::string> ids{"a", "b"};
    const std::vector<std::string> texts{"राहदानी", "शुल्क कति"};
    const auto store = dense::embed_to_store(embedder, ids, texts, dense::TextKind::passage);
    EXPECT_TRUE(store.normalized());
    EXPECT_EQ(store.size(), 2U);
    EXPECT_NEAR(store.row_norm(1), 1.0, 1e-6);
}

TEST(Synonyms, RoundTrip) {
    oracle::TempDir dir;
    const dense::SynonymTable table{{"पासपोर्ट", "राहदानी"}, {"fee", "शुल्क"}};
    dense::save_synonyms(dir / "s.tsv", table);
    EXPECT_EQ(dense::load_synonyms(dir / "s.tsv"), table);
}
