#include "faqir/service.hpp"

#include <httplib.h>

#include <charconv>
#include <json.hpp>

#include "faqir/text.hpp"

namespace faqir::service {

using nlohmann::json;

namespace {

Response error_response(int status, const std::string& message) {
    return {status, json{{"error", message}, {"status", status}}.dump()};
}

}  // namespace

SearchService::SearchService(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const Searcher> searcher)
    : corpus_(std::move(corpus)), searcher_(std::move(searcher)) {
    if (!corpus_ || !searcher_) {
        throw InvalidArgument("search service needs a corpus and a searcher");
    }
}

Response SearchService::handle_search(const SearchRequest& request) const {
    if (text::normalize(request.q).empty()) {
        return error_response(400, "query 'q' is empty");
    }
    if (request.k < 1 || request.k > kMaxK) {
        return error_response(400, "k must lie in [1, " + std::to_string(kMaxK) + "]");
    }
    try {
        const auto ranking = searcher_->search(request.q, request.k, request.mode);
        json results = json::array();
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            const auto* doc = corpus_->find(ranking[i].id);
            results.push_back({{"id", ranking[i].id},
                               {"text", doc != nullptr ? doc->text : std::string()},
                               {"score", ranking[i].score},
                               {"rank", i + 1}});
        }
        const json body = {{"query", request.q}, {"mode", std::string(to_string(request.mode))}, {"results", results}};
        return {200, body.dump()};
    } catch (const ModeUnavailable& e) {
        return error_response(409, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

Response SearchService::handle_search(const std::multimap<std::string, std::string>& params) const {
    SearchRequest request;
    if (const auto it = params.find("q"); it != params.end()) {
        request.q = it->second;
    }
    if (const auto it = params.find("k"); it != params.end()) {
        const auto& v = it->second;
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            return error_response(400, "k must be a positive integer");
        }
        request.k = k;
    }
    if (const auto it = params.find("mode"); it != params.end()) {
        try {
            request.mode = search_mode_from_string(it->second);
        } catch (const ConfigError& e) {
            return error_response(400, e.what());
        }
    }
    return handle_search(request);
}

Response SearchService::handle_health() const {
    const json body = {{"status", "ok"},
                       {"documents", corpus_->size()},
                       {"indexed_documents", searcher_->has_lexical() ? searcher_->index()->doc_count() : 0},
                       {"vectors", searcher_->vectors() != nullptr ? searcher_->vectors()->size() : 0}};
    return {200, body.dump()};
}

// --- HTTP -----------------------------------------------------------------------

struct HttpServer::Impl {
    std::shared_ptr<const SearchService> service;
    httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<const SearchService> service) : impl_(std::make_unique<Impl>()) {
    impl_->service = std::move(service);
    auto* svc = impl_->service.get();
    impl_->server.Get("/search", [svc](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        const auto r = svc->handle_search(params);
        res.status = r.status;
        res.set_content(r.body, "application/json; charset=utf-8");
    });
    impl_->server.Get("/healthz", [svc](const httplib::Request&, httplib::Response& res) {
        const auto r = svc->handle_health();
        res.status = r.status;
        res.set_content(r.body, "application/json; charset=utf-8");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        return impl_->server.bind_to_any_port(host);
    }
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) {
        impl_->server.stop();
    }
}

}  // namespace faqir::service
