#include "ciao/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "ciao/doc_template.hpp"
#include "ciao/errors.hpp"
#include "ciao/orchestrator.hpp"
#include "ciao/version.hpp"

namespace fs = std::filesystem;

namespace ciao {

namespace {

using nlohmann::json;

std::string read_file(const fs::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw Error("cannot read file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw Error("cannot write file: " + path.string());
    }
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string run_command_capture(const std::string& command, int& exit_code) {
    std::array<char, 512> chunk{};
    std::string output;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (pipe == nullptr) {
        exit_code = -1;
        return "failed to launch command";
    }
    while (fgets(chunk.data(), chunk.size(), pipe) != nullptr) {
        output.append(chunk.data());
    }
    exit_code = pclose(pipe);
    return output;
}

std::string shell_quote(const std::string& value) {
    std::string quoted = "'";
    for (const char c : value) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value != nullptr && *value != '\0' ? value : fallback;
}

// Temp clone directories would leak on SIGINT/SIGTERM since destructors do
// not run; a best-effort handler sweeps the registry before re-raising.
std::mutex g_clone_registry_mutex;

std::set<std::string>& clone_registry() {
    static std::set<std::string> registry;
    return registry;
}

void cleanup_clones_on_signal(int signum) {
    for (const auto& path : clone_registry()) {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::signal(signum, SIG_DFL);
    std::raise(signum);
}

void register_clone(const fs::path& path) {
    std::lock_guard<std::mutex> lock(g_clone_registry_mutex);
    if (clone_registry().empty()) {
        std::signal(SIGINT, cleanup_clones_on_signal);
        std::signal(SIGTERM, cleanup_clones_on_signal);
        std::signal(SIGHUP, cleanup_clones_on_signal);
    }
    clone_registry().insert(path.string());
}

void unregister_clone(const fs::path& path) {
    std::lock_guard<std::mutex> lock(g_clone_registry_mutex);
    clone_registry().erase(path.string());
}

RunReport build_report(const std::vector<GeneratedSection>& sections,
                       const std::optional<CostReport>& costs, const Clock& clock,
                       std::int64_t started_ms, const std::string& started_at,
                       const std::vector<FileEntry>& entries, const FlattenedRepository& flat) {
    RunReport report;
    report.started_at = started_at;
    report.finished_at = clock.iso8601();
    report.wall_time_ms = clock.now_ms() - started_ms;
    report.file_count = entries.size();
    for (const auto& entry : entries) {
        if (!entry.excluded) {
            ++report.included_count;
        }
    }
    report.char_count = flat.char_count;

    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& section = sections[i];
        SectionReport line;
        line.section_id = section.section_id;
        line.duration_ms = section.duration_ms;
        line.input_tokens = section.input_tokens;
        line.output_tokens = section.output_tokens;
        if (costs) {
            line.usd = costs->per_call[i].usd;
        }
        report.total_input_tokens += line.input_tokens;
        report.total_output_tokens += line.output_tokens;
        report.total_usd += line.usd;
        report.per_section.push_back(std::move(line));
        report.wall_time_ms = std::max(report.wall_time_ms, section.duration_ms);
    }
    return report;
}

} // namespace

bool looks_like_git_url(const std::string& source) {
    return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0 ||
           source.rfind("git://", 0) == 0 || source.rfind("ssh://", 0) == 0 ||
           source.rfind("git@", 0) == 0 ||
           (source.size() > 4 && source.compare(source.size() - 4, 4, ".git") == 0);
}

AcquiredRepository AcquiredRepository::open(const std::string& source) {
    AcquiredRepository repo;
    if (!looks_like_git_url(source)) {
        const fs::path local(source);
        if (!fs::exists(local) || !fs::is_directory(local)) {
            throw RepoNotFound("repository root not found: " + source);
        }
        repo.root_ = local;
        return repo;
    }

    static std::atomic<unsigned> counter{0};
    const auto target = fs::temp_directory_path() /
                        ("ciao-clone-" + std::to_string(::getpid()) + "-" +
                         std::to_string(counter.fetch_add(1)));
    int exit_code = 0;
    const auto output = run_command_capture(
        "git clone --depth 1 --quiet " + shell_quote(source) + " " + shell_quote(target.string()),
        exit_code);
    if (exit_code != 0) {
        std::error_code ec;
        fs::remove_all(target, ec);
        throw CloneFailed("git clone failed for " + source + ": " + output);
    }
    repo.root_ = target;
    repo.temp_dir_ = target;
    register_clone(target);
    return repo;
}

AcquiredRepository::AcquiredRepository(AcquiredRepository&& other) noexcept
    : root_(std::move(other.root_)), temp_dir_(std::move(other.temp_dir_)) {
    other.temp_dir_.clear();
}

AcquiredRepository& AcquiredRepository::operator=(AcquiredRepository&& other) noexcept {
    if (this != &other) {
        root_ = std::move(other.root_);
        temp_dir_ = std::move(other.temp_dir_);
        other.temp_dir_.clear();
    }
    return *this;
}

AcquiredRepository::~AcquiredRepository() {
    if (!temp_dir_.empty()) {
        std::error_code ec;
        fs::remove_all(temp_dir_, ec);
        unregister_clone(temp_dir_);
    }
}

std::string format_duration_ms(std::int64_t ms) {
    const std::int64_t minutes = ms / 60000;
    const double seconds = static_cast<double>(ms % 60000) / 1000.0;
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%lldm %.2fs", static_cast<long long>(minutes), seconds);
    return buffer;
}

void write_report(const RunReport& report, const fs::path& path, std::ostream& out) {
    std::int64_t sum_in = 0;
    std::int64_t sum_out = 0;
    Usd sum_usd;
    for (const auto& line : report.per_section) {
        sum_in += line.input_tokens;
        sum_out += line.output_tokens;
        sum_usd += line.usd;
    }
    if (sum_in != report.total_input_tokens || sum_out != report.total_output_tokens ||
        sum_usd != report.total_usd) {
        throw ReportWriteFailed("inconsistent report: totals do not equal the sum of sections");
    }

    json j;
    j["tool"] = kToolName;
    j["tool_version"] = kToolVersion;
    j["started_at"] = report.started_at;
    j["finished_at"] = report.finished_at;
    j["wall_time_ms"] = report.wall_time_ms;
    j["repository"] = {{"file_count", report.file_count},
                       {"included_count", report.included_count},
                       {"char_count", report.char_count}};
    j["sections"] = json::array();
    for (const auto& line : report.per_section) {
        j["sections"].push_back({{"section_id", line.section_id},
                                 {"duration_ms", line.duration_ms},
                                 {"input_tokens", line.input_tokens},
                                 {"output_tokens", line.output_tokens},
                                 {"usd", line.usd.to_string(4)}});
    }
    j["totals"] = {{"input_tokens", report.total_input_tokens},
                   {"output_tokens", report.total_output_tokens},
                   {"usd", report.total_usd.to_string(4)}};
    if (!report.warnings.empty()) {
        j["warnings"] = report.warnings;
    }

    try {
        write_file(path, j.dump(2) + "\n");
    } catch (const Error& err) {
        throw ReportWriteFailed(err.what());
    }
    out << "total: " << format_duration_ms(report.wall_time_ms) << " | "
        << report.total_usd.to_string(4) << " USD\n";
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.jobs < 1) {
        err << "ciao: error: --jobs must be at least 1\n";
        return 2;
    }

    const std::string api_key = env_or("CIAO_API_KEY", "");
    if (!cfg.mock_script && !cfg.dry_run && api_key.empty()) {
        err << "ciao: error: CIAO_API_KEY is not set; provide a credential or use "
               "--mock-script/--dry-run\n";
        return 2;
    }

    try {
        const auto clock = cfg.clock_epoch ? Clock::fixed(*cfg.clock_epoch) : Clock::system();
        const auto started_ms = clock->now_ms();
        const auto started_at = clock->iso8601();

        // 1. acquire + flatten
        const auto repo = AcquiredRepository::open(cfg.source);
        std::vector<FileEntry> entries;
        const auto flat = flatten_repository(repo.root(), cfg.filter, &entries);
        if (cfg.flatten_dump_path) {
            write_file(*cfg.flatten_dump_path, flat.serialize());
        }

        // 2. template
        DocumentationTemplate doc_template =
            cfg.template_path ? parse_template(read_file(*cfg.template_path)) : default_template();

        // 3. prompt bundles (dry run stops here)
        if (cfg.dry_run) {
            for (const auto& section : doc_template.sections) {
                const auto bundle =
                    build_bundle(section, GlobalPromptConfig::defaults(), flat, cfg.budget);
                const auto path = cfg.out_dir / "prompts" /
                                  ("section-" + std::to_string(section.index) + "-" + section.id +
                                   ".txt");
                write_file(path, bundle.concatenated());
            }
            out << "dry run: wrote " << doc_template.sections.size() << " prompt bundles under "
                << (cfg.out_dir / "prompts").string() << "\n";
            return 0;
        }

        // 4. provider
        std::unique_ptr<Provider> provider;
        GenerationOptions options;
        options.budget = cfg.budget;
        options.model_id = cfg.model_id;
        options.max_output_tokens = cfg.max_output_tokens;
        options.temperature = cfg.temperature;
        options.clock = clock;
        options.debug_dir = cfg.out_dir / "debug";
        if (cfg.mock_script) {
            provider = std::make_unique<MockProvider>(read_file(*cfg.mock_script));
            options.retry.sleep_fn = [](std::chrono::milliseconds) {};
            options.retry.jitter_seed = 0;
        } else {
            HttpProviderConfig http;
            http.base_url = env_or("CIAO_BASE_URL", http.base_url);
            http.api_key = api_key;
            provider = std::make_unique<HttpProvider>(std::move(http));
        }

        // 5. generate + assemble
        const auto sections =
            generate_all(doc_template, flat, *provider, cfg.jobs, options);
        GenerationMeta meta{cfg.model_id, clock->iso8601(), kToolVersion};
        const auto intermediate = assemble(sections, doc_template, meta);

        // 6. diagrams
        auto extracted = extract_diagrams(intermediate);
        std::vector<RenderOutcome> outcomes;
        outcomes.reserve(extracted.blocks.size());
        for (const auto& block : extracted.blocks) {
            if (const auto reason = validate_diagram(block)) {
                RenderOutcome invalid;
                invalid.block = block;
                invalid.status = RenderStatus::Invalid;
                invalid.reason = *reason;
                outcomes.push_back(std::move(invalid));
                continue;
            }
            outcomes.push_back(render(block, cfg.renderer, cfg.out_dir));
        }
        const auto document = substitute(intermediate, outcomes);
        write_file(cfg.out_dir / "architecture.md", document.markdown);

        // 7. cost + report
        std::optional<CostReport> costs;
        std::vector<std::string> warnings = std::move(extracted.warnings);
        if (cfg.prices_path) {
            const auto prices = PriceTable::load(cfg.prices_path->string());
            if (prices.models.count(cfg.model_id) == 0) {
                warnings.push_back("no price entry for model '" + cfg.model_id +
                                   "'; costs reported as zero");
            } else {
                std::vector<CostCall> calls;
                for (const auto& section : sections) {
                    calls.push_back(
                        {section.section_id, section.input_tokens, section.output_tokens});
                }
                costs = accumulate_cost(calls, cfg.model_id, prices);
            }
        } else {
            warnings.push_back("no price table supplied; costs reported as zero");
        }
        for (const auto& section : sections) {
            for (const auto& warning : section.warnings) {
                warnings.push_back("section '" + section.section_id + "': " + warning);
            }
        }

        auto report =
            build_report(sections, costs, *clock, started_ms, started_at, entries, flat);
        report.warnings = std::move(warnings);
        write_report(report, cfg.report_path.value_or(cfg.out_dir / "report.json"), out);

        // 8. optional README pointer in the source repository
        if (cfg.emit_readme && !looks_like_git_url(cfg.source)) {
            const auto readme = repo.root() / "README.md";
            std::error_code ec;
            const auto doc_path = fs::weakly_canonical(cfg.out_dir / "architecture.md", ec);
            std::ofstream append(readme, std::ios::app);
            append << "\n## Architecture\n\nSystem-level architecture documentation generated by "
                   << kToolName << " is available at `"
                   << (ec ? (cfg.out_dir / "architecture.md").string() : doc_path.string())
                   << "`.\n";
        }

        out << "wrote " << (cfg.out_dir / "architecture.md").string() << "\n";
        return 0;
    } catch (const SectionGenerationFailed& failure) {
        err << "ciao: error: " << failure.what() << " (partial sections dumped to "
            << (cfg.out_dir / "debug").string() << ")\n";
        return 1;
    } catch (const Error& failure) {
        err << "ciao: error: " << failure.what() << "\n";
        return 1;
    } catch (const std::exception& failure) {
        err << "ciao: internal error: " << failure.what() << "\n";
        return 1;
    }
}

} // namespace ciao
