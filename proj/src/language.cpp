#include "ciao/language.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace ciao {

namespace {

LanguageKind make_c_family() {
    LanguageKind k;
    k.tag = Language::CFamily;
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    k.string_delimiters = {{"\"", "\"", true}, {"'", "'", true}};
    return k;
}

LanguageKind make_python() {
    LanguageKind k;
    k.tag = Language::Python;
    k.line_comment_markers = {"#"};
    // Triple-quoted delimiters listed first so they win over the single-char forms.
    k.string_delimiters = {{"\"\"\"", "\"\"\"", true},
                           {"'''", "'''", true},
                           {"\"", "\"", true},
                           {"'", "'", true}};
    return k;
}

LanguageKind make_shell_family() {
    LanguageKind k;
    k.tag = Language::ShellFamily;
    k.line_comment_markers = {"#"};
    k.string_delimiters = {{"\"", "\"", true}, {"'", "'", false}};
    return k;
}

LanguageKind make_web_markup() {
    LanguageKind k;
    k.tag = Language::WebMarkup;
    k.block_comment_pairs = {{"<!--", "-->"}};
    // No string delimiters: quote characters in markup prose are too common to
    // treat as string state.
    return k;
}

LanguageKind make_js_ts_family() {
    LanguageKind k;
    k.tag = Language::JsTsFamily;
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    k.string_delimiters = {{"\"", "\"", true}, {"'", "'", true}, {"`", "`", true}};
    return k;
}

LanguageKind make_java() {
    LanguageKind k;
    k.tag = Language::Java;
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    k.string_delimiters = {{"\"", "\"", true}, {"'", "'", true}};
    return k;
}

LanguageKind make_go() {
    LanguageKind k;
    k.tag = Language::Go;
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    k.string_delimiters = {{"\"", "\"", true}, {"`", "`", false}, {"'", "'", true}};
    return k;
}

LanguageKind make_rust() {
    LanguageKind k;
    k.tag = Language::Rust;
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    // Single quotes stay out: lifetimes ('a) never close.
    k.string_delimiters = {{"\"", "\"", true}};
    return k;
}

LanguageKind make_yaml() {
    LanguageKind k;
    k.tag = Language::Yaml;
    k.line_comment_markers = {"#"};
    k.string_delimiters = {{"\"", "\"", true}, {"'", "'", false}};
    return k;
}

LanguageKind make_json() {
    LanguageKind k;
    k.tag = Language::Json;
    // JSONC-style: plain JSON has no comments, so stripping is a no-op there.
    k.line_comment_markers = {"//"};
    k.block_comment_pairs = {{"/*", "*/"}};
    k.string_delimiters = {{"\"", "\"", true}};
    return k;
}

LanguageKind make_sql() {
    LanguageKind k;
    k.tag = Language::Sql;
    k.line_comment_markers = {"--"};
    k.block_comment_pairs = {{"/*", "*/"}};
    // Doubled '' escapes close-and-reopen naturally, no backslash handling needed.
    k.string_delimiters = {{"'", "'", false}, {"\"", "\"", false}};
    return k;
}

LanguageKind make_unknown() {
    LanguageKind k;
    k.tag = Language::Unknown;
    return k;
}

const std::vector<LanguageKind>& registry() {
    static const std::vector<LanguageKind> kinds = {
        make_c_family(), make_python(),  make_shell_family(), make_web_markup(),
        make_js_ts_family(), make_java(), make_go(),          make_rust(),
        make_yaml(),     make_json(),    make_sql(),          make_unknown(),
    };
    return kinds;
}

const std::unordered_map<std::string, Language>& extension_map() {
    static const std::unordered_map<std::string, Language> map = {
        {"c", Language::CFamily},    {"h", Language::CFamily},
        {"cpp", Language::CFamily},  {"hpp", Language::CFamily},
        {"cc", Language::CFamily},   {"hh", Language::CFamily},
        {"cxx", Language::CFamily},  {"hxx", Language::CFamily},
        {"cu", Language::CFamily},   {"ino", Language::CFamily},
        {"py", Language::Python},    {"pyi", Language::Python},
        {"sh", Language::ShellFamily},   {"bash", Language::ShellFamily},
        {"zsh", Language::ShellFamily},  {"ksh", Language::ShellFamily},
        {"mk", Language::ShellFamily},   {"cmake", Language::ShellFamily},
        {"html", Language::WebMarkup},   {"htm", Language::WebMarkup},
        {"xml", Language::WebMarkup},    {"xhtml", Language::WebMarkup},
        {"svg", Language::WebMarkup},
        {"js", Language::JsTsFamily},    {"jsx", Language::JsTsFamily},
        {"ts", Language::JsTsFamily},    {"tsx", Language::JsTsFamily},
        {"mjs", Language::JsTsFamily},   {"cjs", Language::JsTsFamily},
        {"java", Language::Java},
        {"go", Language::Go},
        {"rs", Language::Rust},
        {"yml", Language::Yaml},         {"yaml", Language::Yaml},
        {"toml", Language::Yaml},
        {"json", Language::Json},        {"jsonc", Language::Json},
        {"sql", Language::Sql},
    };
    return map;
}

const std::unordered_map<std::string, Language>& exact_name_map() {
    static const std::unordered_map<std::string, Language> map = {
        {"Dockerfile", Language::ShellFamily},
        {"Makefile", Language::ShellFamily},
        {"GNUmakefile", Language::ShellFamily},
        {"CMakeLists.txt", Language::ShellFamily},
        {".gitignore", Language::ShellFamily},
        {".dockerignore", Language::ShellFamily},
        {".gitattributes", Language::ShellFamily},
    };
    return map;
}

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

const LanguageKind& language_kind(Language tag) {
    return registry().at(static_cast<std::size_t>(tag));
}

const std::vector<Language>& known_languages() {
    static const std::vector<Language> langs = [] {
        std::vector<Language> out;
        for (const auto& kind : registry()) {
            if (kind.tag != Language::Unknown) {
                out.push_back(kind.tag);
            }
        }
        return out;
    }();
    return langs;
}

const char* language_name(Language tag) {
    switch (tag) {
    case Language::CFamily: return "c-family";
    case Language::Python: return "python";
    case Language::ShellFamily: return "shell-family";
    case Language::WebMarkup: return "web-markup";
    case Language::JsTsFamily: return "js-ts-family";
    case Language::Java: return "java";
    case Language::Go: return "go";
    case Language::Rust: return "rust";
    case Language::Yaml: return "yaml";
    case Language::Json: return "json";
    case Language::Sql: return "sql";
    case Language::Unknown: return "unknown";
    }
    return "unknown";
}

const LanguageKind& detect_language(std::string_view rel_path) {
    const auto slash = rel_path.find_last_of('/');
    const std::string_view basename =
        slash == std::string_view::npos ? rel_path : rel_path.substr(slash + 1);

    const auto dot = basename.find_last_of('.');
    if (dot != std::string_view::npos && dot > 0 && dot + 1 < basename.size()) {
        const auto ext = lowercase(basename.substr(dot + 1));
        const auto& exts = extension_map();
        if (const auto it = exts.find(ext); it != exts.end()) {
            return language_kind(it->second);
        }
    }

    const auto& names = exact_name_map();
    if (const auto it = names.find(std::string(basename)); it != names.end()) {
        return language_kind(it->second);
    }

    return language_kind(Language::Unknown);
}

} // namespace ciao
