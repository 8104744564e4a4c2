#include "fixtures.hpp"

#include <string>
#include <vector>

#include "faqir/dense.hpp"

namespace fixture {

SearchData write_search_data(const std::filesystem::path& dir, std::uint64_t seed, std::size_t dim, double noise) {
    faqir::pipeline::SyntheticSpec spec;
    spec.n_queries = 20;
    spec.relevant_per_query = 4;
    spec.n_distractors = 200;
    spec.vocabulary_size = 1500;
    spec.paraphrase_noise = noise;

    SearchData d;
    d.dir = dir;
    d.dim = dim;
    d.dataset = faqir::pipeline::generate_synthetic_dataset(spec, seed);
    faqir::pipeline::save_dataset(dir, d.dataset);
    d.corpus = dir / "corpus.jsonl";
    d.queries = dir / "queries.jsonl";
    d.qrels = dir / "qrels.tsv";
    d.synonyms = dir / "synonyms.tsv";
    d.vectors = dir / "doc_vectors.jsonl";

    std::vector<std::string> ids;
    std::vector<std::string> texts;
    for (const auto& doc : d.dataset.corpus) {
        ids.push_back(doc.id);
        texts.push_back(doc.text);
    }
    const faqir::dense::MockEmbedder embedder(dim, d.dataset.synonyms);
    faqir::dense::save_vectors(d.vectors,
                               faqir::dense::embed_to_store(embedder, ids, texts, faqir::dense::TextKind::passage),
                               "mock");
    return d;
}

}  // namespace fixture
