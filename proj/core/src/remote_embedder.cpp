#include "faqir/remote_embedder.hpp"

#include <httplib.h>

#include <algorithm>
#include <json.hpp>

#include "faqir/error.hpp"

namespace faqir::dense {

using nlohmann::json;

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::size_t dim, std::size_t batch_size,
                               std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), dim_(dim), batch_size_(std::max<std::size_t>(batch_size, 1)), timeout_(timeout) {
    if (endpoint_.empty()) {
        throw ConfigError("remote embedding provider needs an endpoint URL");
    }
    if (dim_ == 0) {
        throw ConfigError("remote embedding provider needs a positive dim");
    }
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_texts(std::span<const std::string> texts, TextKind kind) const {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        const auto batch = texts.subspan(start, std::min(batch_size_, texts.size() - start));
        const json body = {{"texts", std::vector<std::string>(batch.begin(), batch.end())},
                           {"kind", std::string(to_string(kind))}};
        const auto res = client.Post("/embed", body.dump(), "application/json");
        if (!res) {
            throw DataError("embedding request to " + endpoint_ + " failed: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw DataError("embedding server returned HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        try {
            const json reply = json::parse(res->body);
            const auto dim = reply.at("dim").get<std::size_t>();
            if (dim != dim_) {
                throw DataError("embedding server dim " + std::to_string(dim) + " does not match configured dim " +
                                std::to_string(dim_));
            }
            const auto& vectors = reply.at("vectors");
            if (vectors.size() != batch.size()) {
                throw DataError("embedding server returned " + std::to_string(vectors.size()) + " vectors for " +
                                std::to_string(batch.size()) + " texts");
            }
            for (const auto& v : vectors) {
                out.emplace_back(v.get<std::vector<float>>());
            }
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed embedding server reply: ") + e.what());
        }
    }
    return out;
}

}  // namespace faqir::dense
