#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace boolrank {

/// Toolkit-wide tokenization rule: lowercase ASCII letters, split on any
/// non-alphanumeric byte, drop empty tokens. No stemming, no stopword
/// removal. Bytes >= 0x80 are kept verbatim inside tokens so multi-byte
/// UTF-8 sequences survive intact.
std::vector<std::string> tokenize(std::string_view text);

/// Collapses runs of whitespace to single spaces and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace boolrank
