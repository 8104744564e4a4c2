#include "faqir/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "faqir/dense.hpp"
#include "faqir/text.hpp"
#include "io_util.hpp"

namespace faqir {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

json parse_record(const std::string& line, std::size_t line_no) {
    try {
        json record = json::parse(line);
        if (!record.is_object()) {
            throw DataError(at_line(line_no, "expected a JSON object"));
        }
        return record;
    } catch (const json::parse_error& e) {
        throw DataError(at_line(line_no, std::string("invalid JSON: ") + e.what()));
    }
}

std::string required_string(const json& record, const char* field, std::size_t line_no) {
    const auto it = record.find(field);
    if (it == record.end()) {
        throw DataError(at_line(line_no, std::string("missing required field '") + field + "'"));
    }
    if (!it->is_string()) {
        throw DataError(at_line(line_no, std::string("field '") + field + "' must be a string"));
    }
    return it->get<std::string>();
}

void require_text(const std::string& text, const char* field, std::size_t line_no) {
    if (text::normalize(text).empty()) {
        throw DataError(at_line(line_no, std::string("field '") + field + "' is empty after normalization"));
    }
}

template <typename Record, typename Parse>
std::vector<Record> read_json_lines(std::istream& in, Parse parse) {
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        records.push_back(parse(parse_record(line, line_no), line_no));
    }
    return records;
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn fn) {
    auto in = detail::open_input(path);
    try {
        return fn(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

template <typename Fn>
void write_to(const std::filesystem::path& path, Fn fn) {
    auto out = detail::open_output(path);
    fn(out);
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

}  // namespace

// --- QrelSet --------------------------------------------------------------------

void QrelSet::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 1) {
        throw InvalidArgument("qrels store only grades >= 1");
    }
    judgments_[query_id][doc_id] = grade;
}

const QrelSet::Judgments* QrelSet::find(const std::string& query_id) const {
    const auto it = judgments_.find(query_id);
    return it == judgments_.end() ? nullptr : &it->second;
}

bool QrelSet::is_relevant(const std::string& query_id, const std::string& doc_id) const {
    const auto* j = find(query_id);
    return j != nullptr && j->contains(doc_id);
}

std::size_t QrelSet::relevant_count(const std::string& query_id) const {
    const auto* j = find(query_id);
    return j == nullptr ? 0 : j->size();
}

std::size_t QrelSet::judgment_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [q, docs] : judgments_) {
        n += docs.size();
    }
    return n;
}

double QrelSet::mean_relevant_per_query() const {
    if (judgments_.empty()) {
        return 0.0;
    }
    return static_cast<double>(judgment_count()) / static_cast<double>(judgments_.size());
}

std::vector<std::string> QrelSet::query_ids() const {
    std::vector<std::string> ids;
    ids.reserve(judgments_.size());
    for (const auto& [q, docs] : judgments_) {
        ids.push_back(q);
    }
    return ids;
}

// --- corpus / queries / pairs -------------------------------------------------

Corpus read_corpus(std::istream& in) {
    auto docs = read_json_lines<Document>(in, [](const json& r, std::size_t line_no) {
        Document d;
        d.id = required_string(r, "_id", line_no);
        if (d.id.empty()) {
            throw DataError(at_line(line_no, "'_id' is empty"));
        }
        d.text = required_string(r, "text", line_no);
        require_text(d.text, "text", line_no);
        if (const auto it = r.find("title"); it != r.end() && !it->is_null()) {
            if (!it->is_string()) {
                throw DataError(at_line(line_no, "field 'title' must be a string"));
            }
            d.title = it->get<std::string>();
        }
        return d;
    });
    return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path) {
    return with_path(path, [](std::istream& in) { return read_corpus(in); });
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& d : corpus) {
        json r = json::object();
        r["_id"] = d.id;
        r["text"] = d.text;
        if (d.title) {
            r["title"] = *d.title;
        }
        out << r.dump() << '\n';
    }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    write_to(path, [&](std::ostream& out) { write_corpus(out, corpus); });
}

QuerySet read_queries(std::istream& in) {
    auto queries = read_json_lines<Query>(in, [](const json& r, std::size_t line_no) {
        Query q;
        q.id = required_string(r, "_id", line_no);
        if (q.id.empty()) {
            throw DataError(at_line(line_no, "'_id' is empty"));
        }
        q.text = required_string(r, "text", line_no);
        require_text(q.text, "text", line_no);
        return q;
    });
    return QuerySet(std::move(queries));
}

QuerySet load_queries(const std::filesystem::path& path) {
    return with_path(path, [](std::istream& in) { return read_queries(in); });
}

void write_queries(std::ostream& out, const QuerySet& queries) {
    for (const auto& q : queries) {
        json r = json::object();
        r["_id"] = q.id;
        r["text"] = q.text;
        out << r.dump() << '\n';
    }
}

void save_queries(const std::filesystem::path& path, const QuerySet& queries) {
    write_to(path, [&](std::ostream& out) { write_queries(out, queries); });
}

std::vector<QAPair> read_pairs(std::istream& in) {
    return read_json_lines<QAPair>(in, [](const json& r, std::size_t line_no) {
        QAPair p;
        p.query_text = required_string(r, "query", line_no);
        p.positive_text = required_string(r, "positive", line_no);
        require_text(p.query_text, "query", line_no);
        require_text(p.positive_text, "positive", line_no);
        return p;
    });
}

std::vector<QAPair> load_pairs(const std::filesystem::path& path) {
    return with_path(path, [](std::istream& in) { return read_pairs(in); });
}

void write_pairs(std::ostream& out, std::span<const QAPair> pairs) {
    for (const auto& p : pairs) {
        json r = json::object();
        r["query"] = p.query_text;
        r["positive"] = p.positive_text;
        out << r.dump() << '\n';
    }
}

void save_pairs(const std::filesystem::path& path, std::span<const QAPair> pairs) {
    write_to(path, [&](std::ostream& out) { write_pairs(out, pairs); });
}

// --- qrels --------------------------------------------------------------------

QrelLoadResult read_qrels(std::istream& in, const Corpus* corpus, const QuerySet* queries, RelevanceMode mode) {
    QrelLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos) {
                break;
            }
            start = tab + 1;
        }
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 3 && fields[0] == "query-id" && fields[1] == "corpus-id" && fields[2] == "score") {
                continue;
            }
            throw DataError(at_line(line_no, "expected header 'query-id\\tcorpus-id\\tscore'"));
        }
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw DataError(at_line(line_no, "expected 3 tab-separated fields"));
        }
        int grade = 0;
        const auto& g = fields[2];
        const auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
        if (ec != std::errc{} || ptr != g.data() + g.size()) {
            throw DataError(at_line(line_no, "score '" + g + "' is not an integer"));
        }
        if (grade < 0) {
            throw DataError(at_line(line_no, "negative relevance grade"));
        }
        if (queries != nullptr && !queries->contains(fields[0])) {
            throw DataError(at_line(line_no, "unknown query id '" + fields[0] + "'"));
        }
        if (corpus != nullptr && !corpus->contains(fields[1])) {
            throw DataError(at_line(line_no, "unknown document id '" + fields[1] + "'"));
        }
        if (grade == 0) {
            result.warnings.push_back(at_line(line_no, "dropped grade-0 judgment (" + fields[0] + ", " + fields[1] + ")"));
            continue;
        }
        if (mode == RelevanceMode::binary && grade != 1) {
            throw DataError(at_line(line_no, "grade " + g + " in binary relevance mode"));
        }
        result.qrels.add(fields[0], fields[1], grade);
    }
    if (!header_seen) {
        throw DataError("qrels file is empty");
    }
    return result;
}

QrelLoadResult load_qrels(const std::filesystem::path& path, const Corpus& corpus, const QuerySet& queries,
                          RelevanceMode mode) {
    return with_path(path, [&](std::istream& in) { return read_qrels(in, &corpus, &queries, mode); });
}

QrelLoadResult load_qrels(const std::filesystem::path& path, RelevanceMode mode) {
    return with_path(path, [&](std::istream& in) { return read_qrels(in, nullptr, nullptr, mode); });
}

void write_qrels(std::ostream& out, const QrelSet& qrels) {
    out << "query-id\tcorpus-id\tscore\n";
    for (const auto& [q, docs] : qrels.all()) {
        for (const auto& [d, grade] : docs) {
            out << q << '\t' << d << '\t' << grade << '\n';
        }
    }
}

void save_qrels(const std::filesystem::path& path, const QrelSet& qrels) {
    write_to(path, [&](std::ostream& out) { write_qrels(out, qrels); });
}

// --- split --------------------------------------------------------------------

void SplitSpec::validate() const {
    for (const double f : {train_fraction, val_fraction, test_fraction}) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ConfigError("split fractions must lie in [0, 1]");
        }
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

PairSplit split_pairs(std::span<const QAPair> pairs, const SplitSpec& spec) {
    spec.validate();
    if (pairs.size() < 3) {
        throw InvalidArgument("split_pairs needs at least 3 pairs");
    }
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    detail::Rng rng(spec.seed);
    rng.shuffle(order);

    const auto n = static_cast<double>(pairs.size());
    // A tiny epsilon keeps exact products such as 20 * 0.15 from flooring to 2.
    const auto n_val = static_cast<std::size_t>(std::floor(n * spec.val_fraction + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(n * spec.test_fraction + 1e-9));
    const std::size_t n_train = pairs.size() - n_val - n_test;

    PairSplit split;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& p = pairs[order[i]];
        if (i < n_train) {
            split.train.push_back(p);
        } else if (i < n_train + n_val) {
            split.val.push_back(p);
        } else {
            split.test.push_back(p);
        }
    }
    return split;
}

// --- dedup --------------------------------------------------------------------

std::vector<DuplicateCandidate> find_near_duplicates(std::span<const std::string> texts,
                                                     const dense::EmbeddingProvider& embedder, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InvalidArgument("duplicate threshold must lie in (0, 1]");
    }
    std::vector<DuplicateCandidate> found;
    if (texts.size() < 2) {
        return found;
    }
    const auto vectors = embedder.embed(texts, dense::TextKind::query);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            const double sim = dense::cosine_similarity(vectors[i], vectors[j]);
            if (sim >= threshold) {
                found.push_back({i, j, sim});
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const DuplicateCandidate& a, const DuplicateCandidate& b) {
        if (a.similarity != b.similarity) {
            return a.similarity > b.similarity;
        }
        return std::tie(a.first, a.second) < std::tie(b.first, b.second);
    });
    return found;
}

// --- evaluation corpus ----------------------------------------------------------

Corpus build_eval_corpus(const Corpus& relevant, const Corpus& distractors, DistractorIds ids) {
    std::vector<Document> merged;
    merged.reserve(relevant.size() + distractors.size());
    for (const auto& d : relevant) {
        auto copy = d;
        copy.provenance = Provenance::relevant;
        merged.push_back(std::move(copy));
    }
    for (const auto& d : distractors) {
        auto copy = d;
        if (ids == DistractorIds::prefix) {
            copy.id = std::string(kDistractorPrefix) + copy.id;
        }
        copy.provenance = Provenance::distractor;
        if (relevant.contains(copy.id)) {
            throw DataError("distractor id '" + copy.id + "' collides with a relevant document");
        }
        merged.push_back(std::move(copy));
    }
    return Corpus(std::move(merged));
}

}  // namespace faqir
