#include "ciao/flatten.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ciao/comment_stripper.hpp"
#include "ciao/errors.hpp"

namespace fs = std::filesystem;

namespace ciao {

namespace {

constexpr const char* kHeader = "# Flattened Repository\n";
constexpr const char* kDelimiter = "================\n";
constexpr std::size_t kCharsPerTokenHeuristic = 4;

bool is_valid_utf8(std::string_view data) {
    std::size_t i = 0;
    while (i < data.size()) {
        const auto byte = static_cast<unsigned char>(data[i]);
        if (byte == 0x00) {
            return false; // NUL bytes mark binary content
        }
        std::size_t len = 0;
        if (byte < 0x80) {
            len = 1;
        } else if ((byte & 0xE0) == 0xC0) {
            len = 2;
        } else if ((byte & 0xF0) == 0xE0) {
            len = 3;
        } else if ((byte & 0xF8) == 0xF0) {
            len = 4;
        } else {
            return false;
        }
        if (i + len > data.size()) {
            return false;
        }
        for (std::size_t j = 1; j < len; ++j) {
            if ((static_cast<unsigned char>(data[i + j]) & 0xC0) != 0x80) {
                return false;
            }
        }
        i += len;
    }
    return true;
}

// Segment-wise glob with `**` crossing segments, `*`/`?` within a segment.
bool match_segment(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star_p = std::string_view::npos, star_t = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star_p = p++;
            star_t = t;
        } else if (star_p != std::string_view::npos) {
            p = star_p + 1;
            t = ++star_t;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

std::vector<std::string_view> split_segments(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= path.size(); ++i) {
        if (i == path.size() || path[i] == '/') {
            if (i > start) {
                out.push_back(path.substr(start, i - start));
            }
            start = i + 1;
        }
    }
    return out;
}

bool match_segments(const std::vector<std::string_view>& pattern,
                    std::size_t pi,
                    const std::vector<std::string_view>& path,
                    std::size_t ti) {
    if (pi == pattern.size()) {
        return ti == path.size();
    }
    if (pattern[pi] == "**") {
        for (std::size_t skip = ti; skip <= path.size(); ++skip) {
            if (match_segments(pattern, pi + 1, path, skip)) {
                return true;
            }
        }
        return false;
    }
    if (ti == path.size()) {
        return false;
    }
    return match_segment(pattern[pi], path[ti]) && match_segments(pattern, pi + 1, path, ti + 1);
}

std::string_view basename_of(std::string_view rel_path) {
    const auto slash = rel_path.find_last_of('/');
    return slash == std::string_view::npos ? rel_path : rel_path.substr(slash + 1);
}

bool matches_any(const std::vector<std::string>& globs, std::string_view rel_path) {
    return std::any_of(globs.begin(), globs.end(),
                       [&](const std::string& g) { return glob_match(g, rel_path); });
}

std::string normalize_separators(const fs::path& p) {
    std::string out = p.generic_string();
    return out;
}

void insert_path(TreeNode& root, const std::string& rel_path) {
    TreeNode* node = &root;
    const auto segments = split_segments(rel_path);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const bool leaf = (i + 1 == segments.size());
        const std::string name(segments[i]);
        auto it = std::find_if(node->children.begin(), node->children.end(),
                               [&](const TreeNode& c) { return c.name == name && c.is_dir == !leaf; });
        if (it == node->children.end()) {
            TreeNode child;
            child.name = name;
            child.is_dir = !leaf;
            node->children.push_back(std::move(child));
            it = std::prev(node->children.end());
        }
        node = &*it;
    }
}

void sort_tree(TreeNode& node) {
    std::sort(node.children.begin(), node.children.end(), [](const TreeNode& a, const TreeNode& b) {
        if (a.is_dir != b.is_dir) {
            return a.is_dir; // directories before files
        }
        return a.name < b.name;
    });
    for (auto& child : node.children) {
        sort_tree(child);
    }
}

void render_tree_lines(const TreeNode& node, int depth, std::string& out) {
    for (const auto& child : node.children) {
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out.append(child.name);
        if (child.is_dir) {
            out.push_back('/');
        }
        out.push_back('\n');
        render_tree_lines(child, depth + 1, out);
    }
}

void collect_leaves(const TreeNode& node, std::string prefix, std::vector<std::string>& out) {
    for (const auto& child : node.children) {
        const std::string path = prefix.empty() ? child.name : prefix + "/" + child.name;
        if (child.is_dir) {
            collect_leaves(child, path, out);
        } else {
            out.push_back(path);
        }
    }
}

} // namespace

const std::vector<std::string>& default_exclude_globs() {
    static const std::vector<std::string> globs = {
        // version-control metadata
        ".git/**", ".hg/**", ".svn/**",
        // build outputs and dependency caches
        "build/**", "**/build/**", "dist/**", "**/dist/**", "target/**", "**/target/**",
        "out/**", "**/out/**", "node_modules/**", "**/node_modules/**",
        "__pycache__/**", "**/__pycache__/**", ".gradle/**", "**/.gradle/**",
        ".venv/**", "**/.venv/**", "venv/**", "**/venv/**", ".tox/**", "**/.tox/**",
        "*.o", "*.obj", "*.a", "*.so", "*.dylib", "*.dll", "*.exe", "*.class", "*.pyc",
        // binary media
        "*.png", "*.jpg", "*.jpeg", "*.gif", "*.bmp", "*.ico", "*.pdf", "*.mp3",
        "*.mp4", "*.avi", "*.mov", "*.webm", "*.ttf", "*.otf", "*.woff", "*.woff2",
        "*.eot", "*.bin", "*.dat", "*.db", "*.sqlite",
        // archives
        "*.zip", "*.tar", "*.gz", "*.tgz", "*.bz2", "*.xz", "*.7z", "*.rar",
        "*.jar", "*.war",
        // generated documentation
        "docs/_build/**", "**/_build/**", "_site/**", "**/.docusaurus/**",
        "**/htmlcov/**", "**/javadoc/**",
    };
    return globs;
}

const std::vector<std::string>& default_always_keep_names() {
    static const std::vector<std::string> names = {
        "Dockerfile",       "docker-compose.yml", "docker-compose.yaml",
        "package.json",     "pom.xml",            "requirements.txt",
        "Cargo.toml",       "CMakeLists.txt",
    };
    return names;
}

FilterConfig FilterConfig::defaults() {
    FilterConfig cfg;
    cfg.exclude_globs = default_exclude_globs();
    cfg.always_keep_names = default_always_keep_names();
    return cfg;
}

bool glob_match(std::string_view pattern, std::string_view rel_path) {
    if (pattern.empty()) {
        return false;
    }
    if (pattern.find('/') == std::string_view::npos) {
        return match_segment(pattern, basename_of(rel_path));
    }
    const auto pattern_segments = split_segments(pattern);
    const auto path_segments = split_segments(rel_path);
    return match_segments(pattern_segments, 0, path_segments, 0);
}

std::vector<FileEntry> discover_files(const fs::path& root, const FilterConfig& cfg) {
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw RepoNotFound("repository root not found: " + root.string());
    }

    std::vector<std::string> rel_paths;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied);
    for (const auto& dirent : it) {
        if (dirent.is_symlink() || !dirent.is_regular_file()) {
            continue;
        }
        rel_paths.push_back(normalize_separators(fs::relative(dirent.path(), root)));
    }
    std::sort(rel_paths.begin(), rel_paths.end());

    std::vector<FileEntry> entries;
    entries.reserve(rel_paths.size());
    std::size_t included = 0;

    for (const auto& rel : rel_paths) {
        FileEntry entry;
        entry.rel_path = rel;
        const auto& kind = detect_language(rel);
        entry.language = kind.tag;
        entry.always_keep =
            std::find(cfg.always_keep_names.begin(), cfg.always_keep_names.end(),
                      std::string(basename_of(rel))) != cfg.always_keep_names.end();

        std::ifstream stream(root / fs::path(rel), std::ios::binary);
        std::ostringstream buffer;
        buffer << stream.rdbuf();
        std::string raw = buffer.str();
        entry.raw_bytes = raw.size();

        if (!is_valid_utf8(raw)) {
            entry.excluded = "binary-or-non-text";
        } else if (raw.size() > cfg.max_file_bytes) {
            entry.excluded = "too-large";
        } else if (!entry.always_keep && matches_any(cfg.exclude_globs, rel)) {
            entry.excluded = "excluded-by-glob";
        } else if (!entry.always_keep && !cfg.include_globs.empty() &&
                   !matches_any(cfg.include_globs, rel)) {
            entry.excluded = "not-included";
        }

        if (!entry.excluded) {
            entry.content = cfg.strip_comments ? strip_comments(raw, kind) : std::move(raw);
            ++included;
        }
        entries.push_back(std::move(entry));
    }

    if (included == 0) {
        throw EmptyAfterFiltering("no files survive filtering under: " + root.string());
    }
    return entries;
}

std::vector<std::string> RepoStructureTree::leaf_paths() const {
    std::vector<std::string> out;
    collect_leaves(root, "", out);
    return out;
}

RepoStructureTree build_structure_tree(const std::vector<std::string>& paths) {
    std::set<std::string> seen;
    RepoStructureTree tree;
    tree.root_name = ".";
    for (const auto& path : paths) {
        if (!seen.insert(path).second) {
            throw DuplicatePath("duplicate path in structure tree: " + path);
        }
        insert_path(tree.root, path);
    }
    sort_tree(tree.root);
    return tree;
}

std::string FlattenedRepository::serialize() const {
    std::string out = header;
    out.push_back('\n');
    out.append(structure_block);
    if (!file_blocks.empty()) {
        out.push_back('\n');
    }
    for (std::size_t i = 0; i < file_blocks.size(); ++i) {
        const auto& block = file_blocks[i];
        out.append(kDelimiter);
        out.append("File: ").append(block.rel_path).push_back('\n');
        out.append(kDelimiter);
        out.append(block.content);
        if (!block.content.empty() && block.content.back() != '\n') {
            out.push_back('\n');
        }
        out.push_back('\n');
    }
    return out;
}

FlattenedRepository render_flattened(const RepoStructureTree& tree,
                                     const std::vector<FileEntry>& entries) {
    const auto order = tree.leaf_paths();

    std::map<std::string, const FileEntry*> by_path;
    for (const auto& entry : entries) {
        if (entry.excluded) {
            continue;
        }
        by_path.emplace(entry.rel_path, &entry);
    }
    if (by_path.size() != order.size()) {
        throw std::invalid_argument("entries do not match the structure tree's leaves");
    }

    FlattenedRepository flat;
    flat.header = kHeader;
    flat.structure_block = "## Directory Structure\n```\n";
    render_tree_lines(tree.root, 0, flat.structure_block);
    flat.structure_block.append("```\n");

    for (const auto& path : order) {
        const auto it = by_path.find(path);
        if (it == by_path.end()) {
            throw std::invalid_argument("structure tree leaf has no entry: " + path);
        }
        flat.file_blocks.push_back({path, it->second->content, it->second->always_keep});
    }

    const std::string serialized = flat.serialize();
    flat.char_count = serialized.size();
    flat.estimated_tokens =
        (serialized.size() + kCharsPerTokenHeuristic - 1) / kCharsPerTokenHeuristic;
    return flat;
}

FlattenedRepository flatten_repository(const fs::path& root, const FilterConfig& cfg,
                                       std::vector<FileEntry>* all_entries_out) {
    auto entries = discover_files(root, cfg);
    std::vector<std::string> included_paths;
    for (const auto& entry : entries) {
        if (!entry.excluded) {
            included_paths.push_back(entry.rel_path);
        }
    }
    const auto tree = build_structure_tree(included_paths);
    auto flat = render_flattened(tree, entries);
    if (all_entries_out != nullptr) {
        *all_entries_out = std::move(entries);
    }
    return flat;
}

} // namespace ciao
