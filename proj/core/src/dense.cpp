#include "faqir/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "faqir/error.hpp"
#include "faqir/remote_embedder.hpp"
#include "faqir/text.hpp"
#include "io_util.hpp"

namespace faqir::dense {

using nlohmann::json;

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgument("embedding vector must have at least one component");
    }
    for (const float v : values_) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("embedding vector has a non-finite component");
        }
    }
}

double EmbeddingVector::norm() const { return l2_norm(values_); }

double dot(std::span<const float> a, std::span<const float> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

namespace {

double clamp_cosine(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw InvalidArgument("cosine similarity of a zero vector is undefined");
    }
    return clamp_cosine(dot(a.values(), b.values()) / (na * nb));
}

EmbeddingVector l2_normalized(const EmbeddingVector& v) {
    const double n = v.norm();
    if (n == 0.0) {
        throw InvalidArgument("cannot normalize a zero vector");
    }
    std::vector<float> out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
    }
    return EmbeddingVector(std::move(out));
}

// --- VectorStore --------------------------------------------------------------

VectorStore::VectorStore(std::size_t dim, bool normalized) : dim_(dim), normalized_(normalized) {
    if (dim == 0) {
        throw InvalidArgument("vector store dimension must be positive");
    }
}

void VectorStore::add(std::string id, const EmbeddingVector& vector, double norm_tolerance) {
    if (vector.dim() != dim_) {
        throw InvalidArgument("vector '" + id + "' has dim " + std::to_string(vector.dim()) + ", store expects " +
                              std::to_string(dim_));
    }
    const double n = vector.norm();
    if (normalized_ && std::abs(n - 1.0) > norm_tolerance) {
        throw InvalidArgument("vector '" + id + "' has norm " + std::to_string(n) + " in a normalized store");
    }
    if (rows_.contains(id)) {
        throw InvalidArgument("duplicate vector id '" + id + "'");
    }
    rows_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), vector.values().begin(), vector.values().end());
    norms_.push_back(n);
}

std::span<const float> VectorStore::row(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::optional<EmbeddingVector> VectorStore::get(const std::string& id) const {
    const auto it = rows_.find(id);
    if (it == rows_.end()) {
        return std::nullopt;
    }
    const auto r = row(it->second);
    return EmbeddingVector(std::vector<float>(r.begin(), r.end()));
}

Ranking dense_search(const VectorStore& store, const EmbeddingVector& query, std::size_t k) {
    if (query.dim() != store.dim()) {
        throw InvalidArgument("query dim " + std::to_string(query.dim()) + " does not match store dim " +
                              std::to_string(store.dim()));
    }
    const double qn = query.norm();
    if (qn == 0.0) {
        throw InvalidArgument("query vector is all zeros");
    }
    Ranking scored;
    scored.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const double rn = store.row_norm(i);
        if (rn == 0.0) {
            continue;
        }
        const double denom = store.normalized() ? qn : qn * rn;
        scored.push_back({store.ids()[i], clamp_cosine(dot(store.row(i), query.values()) / denom)});
    }
    if (k < scored.size()) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                          ranks_before);
        scored.resize(k);
    } else {
        std::sort(scored.begin(), scored.end(), ranks_before);
    }
    return scored;
}

double mnrl_loss(std::span<const EmbeddingVector> queries, std::span<const EmbeddingVector> positives,
                 const MnrlConfig& config) {
    if (queries.empty() || queries.size() != positives.size()) {
        throw InvalidArgument("mnrl_loss needs equally sized, non-empty query and positive batches");
    }
    if (!(config.scale > 0.0)) {
        throw InvalidArgument("mnrl scale must be positive");
    }
    const std::size_t batch = queries.size();
    std::vector<double> logits(batch);
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        for (std::size_t j = 0; j < batch; ++j) {
            logits[j] = config.scale * cosine_similarity(queries[i], positives[j]);
        }
        const double peak = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (const double l : logits) {
            sum += std::exp(l - peak);
        }
        total += (peak + std::log(sum)) - logits[i];
    }
    return total / static_cast<double>(batch);
}

// --- providers ----------------------------------------------------------------

std::string_view to_string(TextKind kind) { return kind == TextKind::query ? "query" : "passage"; }

std::vector<EmbeddingVector> EmbeddingProvider::embed(std::span<const std::string> texts, TextKind kind) const {
    const std::string& prefix = kind == TextKind::query ? query_prefix_ : passage_prefix_;
    std::vector<EmbeddingVector> out;
    if (prefix.empty()) {
        out = embed_texts(texts, kind);
    } else {
        std::vector<std::string> prefixed;
        prefixed.reserve(texts.size());
        for (const auto& t : texts) {
            prefixed.push_back(prefix + t);
        }
        out = embed_texts(prefixed, kind);
    }
    if (out.size() != texts.size()) {
        throw DataError("embedding provider returned " + std::to_string(out.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : out) {
        if (v.dim() != dim()) {
            throw DataError("embedding provider returned dim " + std::to_string(v.dim()) + ", expected " +
                            std::to_string(dim()));
        }
    }
    return out;
}

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text, TextKind kind) const {
    return embed(std::span<const std::string>(&text, 1), kind).front();
}

void EmbeddingProvider::set_prefixes(std::string query_prefix, std::string passage_prefix) {
    query_prefix_ = std::move(query_prefix);
    passage_prefix_ = std::move(passage_prefix);
}

SynonymTable load_synonyms(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    SynonymTable table;
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 'variant<TAB>canonical'");
        }
        table[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return table;
}

void save_synonyms(const std::filesystem::path& path, const SynonymTable& table) {
    std::vector<std::pair<std::string, std::string>> rows(table.begin(), table.end());
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [variant, canonical] : rows) {
        out += variant + '\t' + canonical + '\n';
    }
    detail::write_text_file(path, out);
}

std::size_t token_bucket(std::string_view token, std::size_t dim) {
    // FNV-1a, 64 bit
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : token) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h % dim);
}

EmbeddingVector mock_embed(std::string_view text, std::size_t dim, const SynonymTable* synonyms) {
    if (dim < 8) {
        throw InvalidArgument("mock embedding dim must be at least 8");
    }
    const auto tokens = text::analyze(text);
    if (tokens.empty()) {
        throw InvalidArgument("cannot embed text without tokens");
    }
    std::vector<double> counts(dim, 0.0);
    for (const auto& token : tokens) {
        std::string_view canonical = token;
        if (synonyms != nullptr) {
            if (const auto it = synonyms->find(token); it != synonyms->end()) {
                canonical = it->second;
            }
        }
        counts[token_bucket(canonical, dim)] += 1.0;
    }
    double norm = 0.0;
    for (const double c : counts) {
        norm += c * c;
    }
    norm = std::sqrt(norm);
    std::vector<float> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        values[i] = static_cast<float>(counts[i] / norm);
    }
    return EmbeddingVector(std::move(values));
}

MockEmbedder::MockEmbedder(std::size_t dim, SynonymTable synonyms) : dim_(dim), synonyms_(std::move(synonyms)) {
    if (dim < 8) {
        throw InvalidArgument("mock embedding dim must be at least 8");
    }
}

std::vector<EmbeddingVector> MockEmbedder::embed_texts(std::span<const std::string> texts, TextKind) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        out.push_back(mock_embed(t, dim_, synonyms_.empty() ? nullptr : &synonyms_));
    }
    return out;
}

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::mock:
            return "mock";
        case ProviderKind::file:
            return "file";
        case ProviderKind::remote:
            return "remote";
    }
    return "unknown";
}

ProviderKind provider_kind_from_string(std::string_view name) {
    if (name == "mock") {
        return ProviderKind::mock;
    }
    if (name == "file") {
        return ProviderKind::file;
    }
    if (name == "remote") {
        return ProviderKind::remote;
    }
    throw ConfigError("unknown embedding provider kind '" + std::string(name) + "'");
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec) {
    std::unique_ptr<EmbeddingProvider> provider;
    switch (spec.kind) {
        case ProviderKind::mock:
            provider = std::make_unique<MockEmbedder>(
                spec.dim, spec.synonyms.empty() ? SynonymTable{} : load_synonyms(spec.synonyms));
            break;
        case ProviderKind::remote:
            provider = std::make_unique<RemoteEmbedder>(spec.endpoint, spec.dim);
            break;
        case ProviderKind::file:
            throw InvalidArgument("a file provider only serves precomputed vectors and cannot embed text");
    }
    provider->set_prefixes(spec.query_prefix, spec.passage_prefix);
    return provider;
}

// --- vector files -------------------------------------------------------------

VectorStore read_vectors(std::istream& in, std::size_t expected_dim) {
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (!detail::is_blank(line)) {
            break;
        }
    }
    if (line_no == 0 || detail::is_blank(line)) {
        throw DataError("vector file is empty");
    }
    std::size_t dim = 0;
    std::size_t count = 0;
    bool normalized = false;
    try {
        const json header = json::parse(line);
        dim = header.at("dim").get<std::size_t>();
        count = header.at("count").get<std::size_t>();
        normalized = header.at("normalized").get<bool>();
    } catch (const json::exception& e) {
        throw DataError("line " + std::to_string(line_no) + ": bad vector header: " + e.what());
    }
    if (dim == 0) {
        throw DataError("vector header declares dim 0");
    }
    if (expected_dim != 0 && dim != expected_dim) {
        throw DataError("vector header dim " + std::to_string(dim) + " does not match expected dim " +
                        std::to_string(expected_dim));
    }
    VectorStore store(dim, normalized);
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        std::string id;
        std::vector<float> values;
        try {
            const json record = json::parse(line);
            id = record.at("_id").get<std::string>();
            const auto& vec = record.at("vector");
            if (!vec.is_array()) {
                throw DataError("line " + std::to_string(line_no) + ": 'vector' is not an array");
            }
            values.reserve(vec.size());
            for (const auto& x : vec) {
                values.push_back(static_cast<float>(x.get<double>()));
            }
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(line_no) + ": malformed vector record: " + e.what());
        }
        if (values.size() != dim) {
            throw DataError("vector '" + id + "' has " + std::to_string(values.size()) + " values, header dim is " +
                            std::to_string(dim));
        }
        try {
            store.add(id, EmbeddingVector(std::move(values)), kImportNormTolerance);
        } catch (const InvalidArgument& e) {
            throw DataError("line " + std::to_string(line_no) + ": vector '" + id + "': " + e.what());
        }
    }
    if (store.size() != count) {
        throw DataError("vector header declares count " + std::to_string(count) + " but file has " +
                        std::to_string(store.size()) + " records");
    }
    return store;
}

VectorStore import_vectors(const std::filesystem::path& path, std::size_t expected_dim) {
    auto in = detail::open_input(path);
    try {
        return read_vectors(in, expected_dim);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_vectors(std::ostream& out, const VectorStore& store, std::string_view model) {
    json header = {{"dim", store.dim()},
                   {"count", store.size()},
                   {"normalized", store.normalized()},
                   {"model", std::string(model)}};
    out << header.dump() << '\n';
    char buf[32];
    for (std::size_t i = 0; i < store.size(); ++i) {
        out << "{\"_id\":" << json(store.ids()[i]).dump() << ",\"vector\":[";
        const auto r = store.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.8e", static_cast<double>(r[j]));
            if (j != 0) {
                out << ',';
            }
            out << buf;
        }
        out << "]}\n";
    }
}

void save_vectors(const std::filesystem::path& path, const VectorStore& store, std::string_view model) {
    auto out = detail::open_output(path);
    write_vectors(out, store, model);
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

VectorStore embed_to_store(const EmbeddingProvider& provider, std::span<const std::string> ids,
                           std::span<const std::string> texts, TextKind kind) {
    if (ids.size() != texts.size()) {
        throw InvalidArgument("ids and texts differ in length");
    }
    const auto vectors = provider.embed(texts, kind);
    VectorStore store(provider.dim(), true);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        store.add(ids[i], l2_normalized(vectors[i]));
    }
    return store;
}

}  // namespace faqir::dense
