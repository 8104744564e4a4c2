#include "faqir/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "faqir/error.hpp"
#include "io_util.hpp"

namespace faqir::lexical {

using nlohmann::json;

void BM25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw ConfigError("bm25 k1 must be a finite value >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ConfigError("bm25 b must lie in [0, 1]");
    }
}

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
    const auto n = static_cast<double>(doc_count);
    const auto df = static_cast<double>(doc_freq);
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double bm25_tf_weight(const BM25Params& params, double tf, double doc_length, double avg_doc_length) {
    const double length_ratio = avg_doc_length > 0.0 ? doc_length / avg_doc_length : 0.0;
    return (tf * (params.k1 + 1.0)) / (tf + params.k1 * (1.0 - params.b + params.b * length_ratio));
}

InvertedIndex::InvertedIndex(BM25Params params) : params_(params) { params_.validate(); }

InvertedIndex InvertedIndex::build(const Corpus& corpus, const BM25Params& params) {
    if (corpus.empty()) {
        throw DataError("empty corpus");
    }
    InvertedIndex index(params);
    for (const auto& doc : corpus) {
        const auto tokens = text::analyze(doc.text);
        index.add_document(doc.id, tokens);
    }
    return index;
}

void InvertedIndex::add_document(const std::string& id, std::span<const std::string> tokens) {
    if (doc_pos_.contains(id)) {
        throw InvalidArgument("document '" + id + "' is already indexed");
    }
    const auto doc = static_cast<std::uint32_t>(doc_ids_.size());
    doc_pos_.emplace(id, doc);
    doc_ids_.push_back(id);
    doc_len_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total_length_ += tokens.size();

    std::unordered_map<std::uint32_t, std::uint32_t> counts;
    std::vector<std::uint32_t> order;
    for (const auto& token : tokens) {
        auto [it, inserted] = term_ids_.try_emplace(token, static_cast<std::uint32_t>(terms_.size()));
        if (inserted) {
            terms_.push_back(token);
            postings_.emplace_back();
        }
        if (counts[it->second]++ == 0) {
            order.push_back(it->second);
        }
    }
    for (const auto term : order) {
        postings_[term].push_back({doc, counts[term]});
    }
}

double InvertedIndex::avg_doc_length() const noexcept {
    if (doc_ids_.empty()) {
        return 0.0;
    }
    return static_cast<double>(total_length_) / static_cast<double>(doc_ids_.size());
}

std::uint32_t InvertedIndex::doc_position(const std::string& id) const {
    const auto it = doc_pos_.find(id);
    if (it == doc_pos_.end()) {
        throw InvalidArgument("unknown document id '" + id + "'");
    }
    return it->second;
}

std::size_t InvertedIndex::doc_length(const std::string& id) const { return doc_len_[doc_position(id)]; }

std::size_t InvertedIndex::doc_freq(const std::string& term) const { return postings(term).size(); }

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
    const auto it = term_ids_.find(term);
    if (it == term_ids_.end()) {
        return {};
    }
    return postings_[it->second];
}

std::size_t InvertedIndex::term_freq(const std::string& term, const std::string& doc_id) const {
    const auto doc = doc_position(doc_id);
    const auto list = postings(term);
    // postings are appended in document order
    const auto it = std::lower_bound(list.begin(), list.end(), doc,
                                     [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

std::vector<std::string> InvertedIndex::terms() const {
    auto out = terms_;
    std::sort(out.begin(), out.end());
    return out;
}

double InvertedIndex::term_score(std::uint32_t term, std::uint32_t doc, std::uint32_t tf) const {
    const double idf = bm25_idf(doc_ids_.size(), postings_[term].size());
    return idf * bm25_tf_weight(params_, static_cast<double>(tf), static_cast<double>(doc_len_[doc]),
                                avg_doc_length());
}

double InvertedIndex::score(std::span<const std::string> query_tokens, const std::string& doc_id) const {
    const auto doc = doc_position(doc_id);
    double total = 0.0;
    for (const auto& token : query_tokens) {
        const auto it = term_ids_.find(token);
        if (it == term_ids_.end()) {
            continue;
        }
        const auto tf = term_freq(token, doc_id);
        if (tf == 0) {
            continue;
        }
        total += term_score(it->second, doc, static_cast<std::uint32_t>(tf));
    }
    return total;
}

Ranking InvertedIndex::search_tokens(std::span<const std::string> query_tokens, std::size_t k) const {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    std::vector<double> acc(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& token : query_tokens) {
        const auto it = term_ids_.find(token);
        if (it == term_ids_.end()) {
            continue;
        }
        for (const auto& p : postings_[it->second]) {
            if (acc[p.doc] == 0.0) {
                touched.push_back(p.doc);
            }
            acc[p.doc] += term_score(it->second, p.doc, p.tf);
        }
    }
    Ranking ranking;
    ranking.reserve(touched.size());
    for (const auto doc : touched) {
        if (acc[doc] > 0.0) {
            ranking.push_back({doc_ids_[doc], acc[doc]});
        }
    }
    if (k < ranking.size()) {
        std::partial_sort(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k), ranking.end(),
                          ranks_before);
        ranking.resize(k);
    } else {
        std::sort(ranking.begin(), ranking.end(), ranks_before);
    }
    return ranking;
}

Ranking InvertedIndex::search(std::string_view query_text, std::size_t k) const {
    return search_tokens(text::analyze(query_text), k);
}

// --- persistence --------------------------------------------------------------

void InvertedIndex::write(std::ostream& out) const {
    json docs = json::array();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        docs.push_back({doc_ids_[i], doc_len_[i]});
    }
    json terms = json::array();
    std::vector<std::uint32_t> order(terms_.size());
    for (std::uint32_t t = 0; t < order.size(); ++t) {
        order[t] = t;
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return terms_[a] < terms_[b]; });
    for (const auto t : order) {
        json plist = json::array();
        for (const auto& p : postings_[t]) {
            plist.push_back({p.doc, p.tf});
        }
        terms.push_back({{"term", terms_[t]}, {"postings", std::move(plist)}});
    }
    const json root = {{"format", kIndexFormat},
                       {"version", kIndexVersion},
                       {"params", {{"k1", params_.k1}, {"b", params_.b}}},
                       {"documents", std::move(docs)},
                       {"terms", std::move(terms)}};
    out << root.dump() << '\n';
}

InvertedIndex InvertedIndex::read(std::istream& in) {
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("index file is not valid JSON: ") + e.what());
    }
    try {
        if (root.at("format").get<std::string>() != kIndexFormat) {
            throw DataError("not a " + std::string(kIndexFormat) + " file");
        }
        const int version = root.at("version").get<int>();
        if (version != kIndexVersion) {
            throw DataError("unsupported index version " + std::to_string(version));
        }
        BM25Params params{root.at("params").at("k1").get<double>(), root.at("params").at("b").get<double>()};
        InvertedIndex index(params);
        for (const auto& d : root.at("documents")) {
            const auto id = d.at(0).get<std::string>();
            const auto len = d.at(1).get<std::uint32_t>();
            if (!index.doc_pos_.emplace(id, static_cast<std::uint32_t>(index.doc_ids_.size())).second) {
                throw DataError("duplicate document id '" + id + "' in index");
            }
            index.doc_ids_.push_back(id);
            index.doc_len_.push_back(len);
            index.total_length_ += len;
        }
        for (const auto& t : root.at("terms")) {
            const auto term = t.at("term").get<std::string>();
            const auto tid = static_cast<std::uint32_t>(index.terms_.size());
            if (!index.term_ids_.emplace(term, tid).second) {
                throw DataError("duplicate term '" + term + "' in index");
            }
            index.terms_.push_back(term);
            auto& plist = index.postings_.emplace_back();
            for (const auto& p : t.at("postings")) {
                const Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
                if (posting.doc >= index.doc_ids_.size() || posting.tf == 0 ||
                    (!plist.empty() && plist.back().doc >= posting.doc)) {
                    throw DataError("corrupt posting list for term '" + term + "'");
                }
                plist.push_back(posting);
            }
            if (plist.empty()) {
                throw DataError("empty posting list for term '" + term + "'");
            }
        }
        return index;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed index file: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("malformed index parameters: ") + e.what());
    }
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    auto out = detail::open_output(path);
    write(out);
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    if (a.params_.k1 != b.params_.k1 || a.params_.b != b.params_.b || a.doc_ids_ != b.doc_ids_ ||
        a.doc_len_ != b.doc_len_ || a.terms_.size() != b.terms_.size()) {
        return false;
    }
    for (std::size_t t = 0; t < a.terms_.size(); ++t) {
        const auto it = b.term_ids_.find(a.terms_[t]);
        if (it == b.term_ids_.end() || a.postings_[t] != b.postings_[it->second]) {
            return false;
        }
    }
    return true;
}

}  // namespace faqir::lexical
