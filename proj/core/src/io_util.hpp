#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace faqir::detail {

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/// getline that also drops a trailing '\r'.
bool read_line(std::istream& in, std::string& line);

bool is_blank(std::string_view s);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Seeded generator with implementation-independent bounded draws, so that
/// splits and synthetic datasets are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Integer in [0, bound); modulo bias is below 2^-40 for the bounds used here.
    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace faqir::detail
