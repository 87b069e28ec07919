#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ciao {

enum class Language {
    CFamily,
    Python,
    ShellFamily,
    WebMarkup,
    JsTsFamily,
    Java,
    Go,
    Rust,
    Yaml,
    Json,
    Sql,
    Unknown,
};

/// One way of quoting text in a language. `backslash_escape` controls whether
/// a backslash inside the string protects the following character.
struct StringDelimiter {
    std::string open;
    std::string close;
    bool backslash_escape = true;
};

/// Comment and string syntax for one language family. Unknown carries empty
/// marker lists, which disables stripping entirely.
struct LanguageKind {
    Language tag = Language::Unknown;
    std::vector<std::string> line_comment_markers;
    std::vector<std::pair<std::string, std::string>> block_comment_pairs;
    std::vector<StringDelimiter> string_delimiters;
};

/// Registry entry for `tag`; the returned reference is valid for the program's lifetime.
const LanguageKind& language_kind(Language tag);

/// All non-Unknown registry entries, for corpus-style iteration.
const std::vector<Language>& known_languages();

const char* language_name(Language tag);

/// Deterministic mapping from a repository-relative path to a language kind:
/// extension first, then exact-name rules (Dockerfile, Makefile, ...), else Unknown.
const LanguageKind& detect_language(std::string_view rel_path);

} // namespace ciao
