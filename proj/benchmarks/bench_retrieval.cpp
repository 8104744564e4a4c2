#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "faqir/dense.hpp"
#include "faqir/hybrid.hpp"
#include "faqir/lexical.hpp"
#include "faqir/synthetic.hpp"

using namespace faqir;

namespace {

pipeline::SyntheticDataset dataset(std::size_t distractors) {
    pipeline::SyntheticSpec spec;
    spec.n_distractors = distractors;
    spec.vocabulary_size = 5000 + distractors;
    return pipeline::generate_synthetic_dataset(spec, 1);
}

void BM_Bm25Build(benchmark::State& state) {
    const auto ds = dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lexical::InvertedIndex::build(ds.corpus));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ds.corpus.size()));
}
BENCHMARK(BM_Bm25Build)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Bm25Search(benchmark::State& state) {
    const auto ds = dataset(static_cast<std::size_t>(state.range(0)));
    const auto index = lexical::InvertedIndex::build(ds.corpus);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.search(ds.queries[i++ % ds.queries.size()].text, 100));
    }
}
BENCHMARK(BM_Bm25Search)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_DenseSearch(benchmark::State& state) {
    const auto ds = dataset(static_cast<std::size_t>(state.range(0)));
    const dense::MockEmbedder embedder(256, ds.synonyms);
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    for (const auto& d : ds.corpus) {
        ids.push_back(d.id);
        texts.push_back(d.text);
    }
    const auto store = dense::embed_to_store(embedder, ids, texts, dense::TextKind::passage);
    std::vector<dense::EmbeddingVector> queries;
    for (const auto& q : ds.queries) {
        queries.push_back(embedder.embed_one(q.text, dense::TextKind::query));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense::dense_search(store, queries[i++ % queries.size()], 100));
    }
}
BENCHMARK(BM_DenseSearch)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_MockEmbed(benchmark::State& state) {
    const auto ds = dataset(100);
    const dense::MockEmbedder embedder(256, ds.synonyms);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(embedder.embed_one(ds.corpus[i++ % ds.corpus.size()].text, dense::TextKind::passage));
    }
}
BENCHMARK(BM_MockEmbed)->Unit(benchmark::kMicrosecond);

void BM_Fuse(benchmark::State& state) {
    const auto ds = dataset(2000);
    const auto index = lexical::InvertedIndex::build(ds.corpus);
    const auto lex = index.search(ds.queries[0].text, 100);
    Ranking den;
    for (std::size_t i = 0; i < 100; ++i) {
        den.push_back({ds.corpus[i * 7].id, 1.0 - static_cast<double>(i) / 100.0});
    }
    hybrid::FusionConfig cfg;
    cfg.method = state.range(0) == 0 ? hybrid::FusionMethod::weighted_minmax : hybrid::FusionMethod::rrf;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hybrid::fuse_rankings(lex, den, cfg));
    }
}
BENCHMARK(BM_Fuse)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
