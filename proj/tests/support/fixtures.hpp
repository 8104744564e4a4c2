#pragma once

#include <cstdint>
#include <filesystem>

#include "faqir/synthetic.hpp"

namespace fixture {

/// A synthetic collection on disk with mock document vectors.
struct SearchData {
    std::filesystem::path dir;
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path qrels;
    std::filesystem::path synonyms;
    std::filesystem::path vectors;
    std::size_t dim = 64;
    faqir::pipeline::SyntheticDataset dataset;
};

SearchData write_search_data(const std::filesystem::path& dir, std::uint64_t seed, std::size_t dim = 64,
                             double noise = 0.5);

}  // namespace fixture
