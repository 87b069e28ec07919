#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ciao/diagram.hpp"
#include "ciao/flatten.hpp"
#include "ciao/llm.hpp"
#include "ciao/prompt.hpp"

namespace ciao {

struct RunConfig {
    std::string source; // local path or remote Git URL
    std::filesystem::path out_dir = "./ciao-out";
    std::string model_id = "gpt-5";
    std::optional<std::filesystem::path> template_path;
    RendererConfig renderer;
    TokenBudget budget;
    FilterConfig filter = FilterConfig::defaults();
    int jobs = 8;
    bool dry_run = false;
    std::optional<std::filesystem::path> report_path;
    bool emit_readme = false;
    std::optional<std::filesystem::path> mock_script;
    std::optional<std::filesystem::path> prices_path;
    /// Fixed-clock test mode: pins every timestamp and duration.
    std::optional<std::int64_t> clock_epoch;
    /// Debug dump of the flattened artifact, byte-identical to the in-memory
    /// serialization.
    std::optional<std::filesystem::path> flatten_dump_path;
    int max_output_tokens = 8192;
    double temperature = 0.2;
};

struct SectionReport {
    std::string section_id;
    std::int64_t duration_ms = 0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    Usd usd;
};

struct RunReport {
    std::string started_at;
    std::string finished_at;
    std::int64_t wall_time_ms = 0;
    std::vector<SectionReport> per_section;
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;
    Usd total_usd;
    std::size_t file_count = 0;     // everything discovered, excluded included
    std::size_t included_count = 0; // files that survived filtering
    std::size_t char_count = 0;     // flattened serialization size
    std::vector<std::string> warnings;
};

/// Local directories are used in place; Git URLs are shallow-cloned (depth 1)
/// into a temp directory removed when this handle goes out of scope.
class AcquiredRepository {
public:
    /// Throws RepoNotFound for missing local paths, CloneFailed with the
    /// underlying tool's message for failing clones.
    static AcquiredRepository open(const std::string& source);

    AcquiredRepository(AcquiredRepository&& other) noexcept;
    AcquiredRepository& operator=(AcquiredRepository&& other) noexcept;
    AcquiredRepository(const AcquiredRepository&) = delete;
    AcquiredRepository& operator=(const AcquiredRepository&) = delete;
    ~AcquiredRepository();

    const std::filesystem::path& root() const { return root_; }

private:
    AcquiredRepository() = default;
    std::filesystem::path root_;
    std::filesystem::path temp_dir_; // empty for local sources
};

bool looks_like_git_url(const std::string& source);

/// "3m 0.90s" style rendering of a millisecond duration.
std::string format_duration_ms(std::int64_t ms);

/// Validates totals against the per-section sums (ReportWriteFailed on
/// mismatch or I/O error), writes the JSON report with USD as 4-fraction-digit
/// decimal strings, and prints `total: <time> | <usd> USD` to `out`.
void write_report(const RunReport& report, const std::filesystem::path& path, std::ostream& out);

/// Full pipeline: flatten, build bundles, generate, assemble, render,
/// substitute, write `architecture.md`, images and `report.json`. Returns the
/// process exit code: 0 success, 1 fatal pipeline error, 2 usage error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace ciao
