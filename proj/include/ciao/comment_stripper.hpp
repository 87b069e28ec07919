#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ciao/language.hpp"

namespace ciao {

/// Removes comments from `text` according to `kind`'s marker tables.
///
/// Single-pass state machine over {code, string, line-comment, block-comment}.
/// Line comments are dropped from the marker to end-of-line, keeping the
/// newline. Block comments are dropped including both delimiters. Markers
/// inside string literals are preserved. An unterminated block comment is not
/// an error: the rest of the text is dropped and a warning is appended to
/// `warnings` when provided. Unknown kinds pass through unchanged.
std::string strip_comments(std::string_view text, const LanguageKind& kind,
                           std::vector<std::string>* warnings = nullptr);

} // namespace ciao
