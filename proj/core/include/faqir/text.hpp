#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace faqir::text {

enum class UnicodeForm {
    nfc,   ///< canonical composition
    nfkc,  ///< compatibility decomposition followed by canonical composition
};

struct NormalizationConfig {
    bool strip_html = true;
    bool strip_urls = true;
    bool strip_special = true;
    UnicodeForm unicode_form = UnicodeForm::nfc;
};

/// Cleans raw text for indexing: drops markup tags, URLs and control/format
/// characters, applies Unicode composition, collapses whitespace runs to a
/// single space and trims. Idempotent for every configuration.
std::string normalize(std::string_view text, const NormalizationConfig& config = {});

/// Ordered list of non-empty tokens without whitespace or punctuation.
using TokenStream = std::vector<std::string>;

/// Splits normalized text into maximal runs of letters, digits and combining
/// marks (any script). Punctuation, including the danda, separates tokens.
/// Latin-script letters are lowercased; nothing else is case folded.
TokenStream tokenize(std::string_view text);

/// normalize() followed by tokenize().
TokenStream analyze(std::string_view text, const NormalizationConfig& config = {});

/// Number of tokens in tokenize(normalize(text)).
std::size_t token_count(std::string_view text);

}  // namespace faqir::text
