#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>

#include "faqir/corpus.hpp"
#include "faqir/searcher.hpp"

namespace faqir::service {

inline constexpr std::size_t kMaxK = 100;
inline constexpr std::size_t kDefaultK = 10;

struct SearchRequest {
    std::string q;
    std::size_t k = kDefaultK;
    SearchMode mode = SearchMode::hybrid;
};

struct Response {
    int status = 200;
    std::string body;  ///< UTF-8 JSON
};

/// Request handling over immutable, shared retrieval state. Handlers are
/// const and safe to call from concurrent server threads.
class SearchService {
public:
    SearchService(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const Searcher> searcher);

    /// 200 with {"query","mode","results":[{"id","text","score","rank"}]};
    /// 400 for an empty query or bad k; 409 when the mode's source is not
    /// loaded; 500 otherwise.
    [[nodiscard]] Response handle_search(const SearchRequest& request) const;

    /// Parses raw query-string parameters (q, k, mode) and dispatches.
    [[nodiscard]] Response handle_search(const std::multimap<std::string, std::string>& params) const;

    /// 200 with corpus and vector counts.
    [[nodiscard]] Response handle_health() const;

private:
    std::shared_ptr<const Corpus> corpus_;
    std::shared_ptr<const Searcher> searcher_;
};

/// HTTP front end: GET /search and GET /healthz.
class HttpServer {
public:
    explicit HttpServer(std::shared_ptr<const SearchService> service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to host:port (port 0 picks a free port) and returns the port,
    /// or -1 on failure.
    int bind(const std::string& host, int port);

    /// Serves until stop(); call after bind().
    bool listen();

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace faqir::service
