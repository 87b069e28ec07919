#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ciao/language.hpp"

namespace ciao {

/// Filtering rules applied while walking the repository.
///
/// `exclude_globs` takes precedence over `include_globs`; `always_keep_names`
/// overrides the glob exclusion for non-binary files. Patterns without a `/`
/// match against the file name at any depth, patterns with a `/` match the
/// full repository-relative path. `*` matches within one path segment, `**`
/// crosses segments, `?` matches a single character.
struct FilterConfig {
    std::vector<std::string> include_globs;
    std::vector<std::string> exclude_globs;
    std::vector<std::string> always_keep_names;
    std::size_t max_file_bytes = 512 * 1024;
    bool strip_comments = true;

    static FilterConfig defaults();
};

/// Default exclusion patterns: version-control metadata, build outputs,
/// binary media, archives, generated documentation.
const std::vector<std::string>& default_exclude_globs();
const std::vector<std::string>& default_always_keep_names();

bool glob_match(std::string_view pattern, std::string_view rel_path);

/// One file seen during discovery. Excluded files carry the reason tag and
/// keep their content empty.
struct FileEntry {
    std::string rel_path;
    Language language = Language::Unknown;
    std::size_t raw_bytes = 0;
    std::string content;
    std::optional<std::string> excluded;
    bool always_keep = false;
};

struct TreeNode {
    std::string name;
    bool is_dir = false;
    std::vector<TreeNode> children; // sorted: directories first, then byte-lexicographic
};

struct RepoStructureTree {
    std::string root_name;
    TreeNode root; // root.name is empty; children are the top-level entries

    /// Depth-first, sorted traversal; defines the canonical file-block order.
    std::vector<std::string> leaf_paths() const;
};

struct FileBlock {
    std::string rel_path;
    std::string content;
    bool always_keep = false;
};

/// The single AI-friendly artifact: fixed header, rendered structure tree,
/// and the ordered file blocks. Serialization is byte-identical across runs
/// for identical input.
struct FlattenedRepository {
    std::string header;
    std::string structure_block;
    std::vector<FileBlock> file_blocks;
    std::size_t char_count = 0;
    std::size_t estimated_tokens = 0;

    std::string serialize() const;
};

/// Walks `root` and returns every regular file as a FileEntry, included ones
/// with stripped content, excluded ones tagged with a reason
/// (`binary-or-non-text`, `too-large`, `excluded-by-glob`, `not-included`).
/// Entries are sorted by rel_path; symbolic links are not followed.
///
/// Throws RepoNotFound if `root` is missing, EmptyAfterFiltering if no file
/// survives the filters.
std::vector<FileEntry> discover_files(const std::filesystem::path& root,
                                      const FilterConfig& cfg);

/// Throws DuplicatePath on a repeated input path.
RepoStructureTree build_structure_tree(const std::vector<std::string>& paths);

/// Renders the flattened artifact. `entries` must be exactly the included
/// files matching the tree's leaves; order is irrelevant (re-sorted into the
/// tree's depth-first order).
FlattenedRepository render_flattened(const RepoStructureTree& tree,
                                     const std::vector<FileEntry>& entries);

/// Convenience: discover + tree + render in one call. `all_entries_out`, when
/// non-null, receives every discovered entry including excluded ones.
FlattenedRepository flatten_repository(const std::filesystem::path& root,
                                       const FilterConfig& cfg,
                                       std::vector<FileEntry>* all_entries_out = nullptr);

} // namespace ciao
