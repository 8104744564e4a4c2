#include "io_util.hpp"

#include <charconv>
#include <sstream>

#include "faqir/error.hpp"
#include "faqir/ranking.hpp"

namespace faqir::detail {

std::ifstream open_input(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw DataError("cannot read '" + path.string() + "': no such file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    auto out = open_output(path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        return std::to_string(value);
    }
    return std::string(buf, ptr);
}

}  // namespace faqir::detail

namespace faqir {

std::string format_score(double score) { return detail::format_double(score); }

}  // namespace faqir
