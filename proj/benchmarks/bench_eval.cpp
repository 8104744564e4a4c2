#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "faqir/eval.hpp"
#include "faqir/stats.hpp"

using namespace faqir;

namespace {

void BM_EvaluateRun(benchmark::State& state) {
    const auto n_queries = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    QrelSet qrels;
    eval::Run run{"sys", {}};
    for (std::size_t q = 0; q < n_queries; ++q) {
        const auto qid = "q" + std::to_string(q);
        for (int r = 0; r < 10; ++r) {
            qrels.add(qid, "d" + std::to_string(rng() % 5000), 1);
        }
        Ranking ranking;
        const std::size_t start = rng() % 5000;
        for (std::size_t i = 0; i < 100; ++i) {
            ranking.push_back({"d" + std::to_string((start + i * 37) % 5000), 100.0 - static_cast<double>(i)});
        }
        run.rankings[qid] = ranking;
    }
    const std::vector<std::size_t> ks{1, 5, 10};
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval::evaluate_run(run, qrels, ks));
    }
}
BENCHMARK(BM_EvaluateRun)->Arg(82)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Wilcoxon(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.1, 1.0);
    std::vector<double> d(static_cast<std::size_t>(state.range(0)));
    for (auto& x : d) {
        x = g(rng);
    }
    stats::WilcoxonOptions opts;
    opts.exact_cutoff = 25;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stats::wilcoxon_signed_rank(d, opts));
    }
}
BENCHMARK(BM_Wilcoxon)->Arg(25)->Arg(82)->Arg(1000);

void BM_PairedT(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.1, 1.0);
    std::vector<double> d(static_cast<std::size_t>(state.range(0)));
    for (auto& x : d) {
        x = g(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(stats::paired_t_test(d));
    }
}
BENCHMARK(BM_PairedT)->Arg(82)->Arg(1000);

}  // namespace
