#include "faqir/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace faqir::text {
namespace {

constexpr char32_t kZwnj = 0x200C;
constexpr char32_t kZwj = 0x200D;

std::u32string decode(std::string_view utf8) {
    const auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    std::u32string out;
    out.reserve(static_cast<std::size_t>(ustr.length()));
    for (int32_t i = 0; i < ustr.length(); i = ustr.moveIndex32(i, 1)) {
        out.push_back(static_cast<char32_t>(ustr.char32At(i)));
    }
    return out;
}

icu::UnicodeString to_icu(const std::u32string& s) {
    return icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()), static_cast<int32_t>(s.size()));
}

std::string encode(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

std::string encode(const std::u32string& s) { return encode(to_icu(s)); }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

std::u32string apply_normalizer(const icu::Normalizer2& norm, const std::u32string& s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::UnicodeString result = norm.normalize(to_icu(s), status);
    if (U_FAILURE(status)) {
        throw std::runtime_error(std::string("unicode normalization failed: ") + u_errorName(status));
    }
    return decode(encode(result));
}

const icu::Normalizer2& nfc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw std::runtime_error("ICU NFC normalizer unavailable");
    }
    return *n;
}

const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw std::runtime_error("ICU NFKC normalizer unavailable");
    }
    return *n;
}

// Whitespace controls become a space; other control, format (except the
// joiners used in Devanagari conjuncts), private-use and surrogate code
// points are dropped.
std::u32string strip_special(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    for (const char32_t c : in) {
        if (is_space(c)) {
            out.push_back(U' ');
            continue;
        }
        if (c == kZwj || c == kZwnj) {
            out.push_back(c);
            continue;
        }
        switch (u_charType(static_cast<UChar32>(c))) {
            case U_CONTROL_CHAR:
            case U_FORMAT_CHAR:
            case U_PRIVATE_USE_CHAR:
            case U_SURROGATE:
                break;
            default:
                out.push_back(c);
        }
    }
    return out;
}

// Every '<' with a later '>' starts a tag running to the first such '>'.
std::u32string strip_tags(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] == U'<') {
            const auto close = in.find(U'>', i + 1);
            if (close != std::u32string::npos) {
                out.push_back(U' ');
                i = close + 1;
                continue;
            }
        }
        out.push_back(in[i]);
        ++i;
    }
    return out;
}

char32_t ascii_lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c; }

bool starts_with_ci(const std::u32string& s, std::size_t pos, std::u32string_view prefix) {
    if (s.size() - pos < prefix.size()) {
        return false;
    }
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (ascii_lower(s[pos + k]) != prefix[k]) {
            return false;
        }
    }
    return true;
}

std::u32string strip_urls(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (starts_with_ci(in, i, U"http://") || starts_with_ci(in, i, U"https://") ||
            starts_with_ci(in, i, U"www.")) {
            while (i < in.size() && !is_space(in[i])) {
                ++i;
            }
            out.push_back(U' ');
            continue;
        }
        out.push_back(in[i]);
        ++i;
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    bool pending_space = false;
    for (const char32_t c : in) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(U' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

bool is_token_char(char32_t c) {
    if (c == kZwj || c == kZwnj) {
        return true;
    }
    const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
    return (mask & (U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK)) != 0;
}

char32_t fold_latin(char32_t c) {
    UErrorCode status = U_ZERO_ERROR;
    if (uscript_getScript(static_cast<UChar32>(c), &status) == USCRIPT_LATIN && U_SUCCESS(status)) {
        return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
    }
    return c;
}

}  // namespace

std::string normalize(std::string_view text, const NormalizationConfig& config) {
    std::u32string s = decode(text);
    // Compatibility folding first so that folded characters ('＜', fullwidth
    // letters) are seen by the stripping passes.
    if (config.unicode_form == UnicodeForm::nfkc) {
        s = apply_normalizer(nfkc(), s);
    }
    if (config.strip_special) {
        s = strip_special(s);
    }
    if (config.strip_html) {
        s = strip_tags(s);
    }
    if (config.strip_urls) {
        s = strip_urls(s);
    }
    s = apply_normalizer(nfc(), s);
    return encode(collapse_whitespace(s));
}

TokenStream tokenize(std::string_view text) {
    TokenStream tokens;
    std::u32string current;
    for (const char32_t c : decode(text)) {
        if (is_token_char(c)) {
            current.push_back(fold_latin(c));
        } else if (!current.empty()) {
            tokens.push_back(encode(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(encode(current));
    }
    return tokens;
}

TokenStream analyze(std::string_view text, const NormalizationConfig& config) {
    return tokenize(normalize(text, config));
}

std::size_t token_count(std::string_view text) { return analyze(text).size(); }

}  // namespace faqir::text
