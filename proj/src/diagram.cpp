#include "ciao/diagram.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include <httplib.h>

#include "ciao/errors.hpp"

namespace fs = std::filesystem;

namespace ciao {

namespace {

struct Line {
    std::size_t begin = 0;
    std::size_t end = 0; // offset one past the last character, excluding '\n'
    std::string_view text;
};

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::size_t end = nl == std::string::npos ? text.size() : nl;
        lines.push_back({pos, end, std::string_view(text.data() + pos, end - pos)});
        if (nl == std::string::npos) {
            break;
        }
        pos = nl + 1;
    }
    return lines;
}

bool is_fence_open(std::string_view line) {
    if (line.rfind("```plantuml", 0) != 0) {
        return false;
    }
    return line.size() == 11 ||
           std::all_of(line.begin() + 11, line.end(),
                       [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

bool is_fence_close(std::string_view line) {
    if (line.rfind("```", 0) != 0) {
        return false;
    }
    return line.size() == 3 ||
           std::all_of(line.begin() + 3, line.end(),
                       [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::optional<int> parse_section_heading(std::string_view line) {
    if (line.rfind("## ", 0) != 0) {
        return std::nullopt;
    }
    std::size_t i = 3;
    int value = 0;
    bool any = false;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') {
        value = value * 10 + (line[i] - '0');
        any = true;
        ++i;
    }
    if (!any || i >= line.size() || line[i] != '.') {
        return std::nullopt;
    }
    return value;
}

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])) != 0) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])) != 0) {
        --end;
    }
    return std::string(text.substr(begin, end - begin));
}

bool command_available(const std::string& command) {
    if (command.empty()) {
        return false;
    }
    if (command.find('/') != std::string::npos) {
        return fs::exists(command);
    }
    const char* path_env = std::getenv("PATH");
    if (path_env == nullptr) {
        return false;
    }
    std::istringstream stream(path_env);
    std::string dir;
    while (std::getline(stream, dir, ':')) {
        if (!dir.empty() && fs::exists(fs::path(dir) / command)) {
            return true;
        }
    }
    return false;
}

fs::path make_scratch_dir() {
    static std::atomic<unsigned> counter{0};
    const auto dir = fs::temp_directory_path() /
                     ("ciao-render-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1)));
    fs::create_directories(dir);
    return dir;
}

RenderOutcome passthrough(const DiagramBlock& block, std::string reason) {
    RenderOutcome outcome;
    outcome.block = block;
    outcome.status = RenderStatus::Passthrough;
    outcome.reason = std::move(reason);
    return outcome;
}

bool write_image(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        return false;
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return static_cast<bool>(out);
}

RenderOutcome render_external(const DiagramBlock& block, const RendererConfig& config,
                              const fs::path& out_dir) {
    if (!command_available(config.command)) {
        return passthrough(block, "renderer-unavailable");
    }

    const auto scratch = make_scratch_dir();
    const auto source_path = scratch / "diagram.puml";
    {
        std::ofstream out(source_path, std::ios::binary);
        out << block.source;
        if (!block.source.empty() && block.source.back() != '\n') {
            out << '\n';
        }
    }

    const std::string command = "\"" + config.command + "\" -tpng -o \"" + scratch.string() +
                                "\" \"" + source_path.string() + "\" >/dev/null 2>&1";
    const int status = std::system(command.c_str());

    RenderOutcome outcome;
    const auto produced = scratch / "diagram.png";
    if (status != 0) {
        outcome = passthrough(block, "renderer-failed (exit " + std::to_string(status) + ")");
    } else if (!fs::exists(produced) || fs::file_size(produced) == 0) {
        outcome = passthrough(block, "renderer-no-output");
    } else {
        const std::string rel = "images/" +
                                diagram_image_name(block.section_index, block.ordinal);
        std::error_code ec;
        fs::create_directories(out_dir / "images", ec);
        fs::copy_file(produced, out_dir / rel, fs::copy_options::overwrite_existing, ec);
        if (ec) {
            outcome = passthrough(block, "renderer-copy-failed: " + ec.message());
        } else {
            outcome.block = block;
            outcome.status = RenderStatus::Rendered;
            outcome.image_rel_path = rel;
        }
    }

    std::error_code cleanup_ec;
    fs::remove_all(scratch, cleanup_ec);
    return outcome;
}

RenderOutcome render_server(const DiagramBlock& block, const RendererConfig& config,
                            const fs::path& out_dir) {
    const auto scheme_end = config.url.find("://");
    if (scheme_end == std::string::npos) {
        return passthrough(block, "renderer-url-invalid");
    }
    const auto path_start = config.url.find('/', scheme_end + 3);
    const std::string base =
        path_start == std::string::npos ? config.url : config.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : config.url.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(60, 0);
    auto response = client.Post(path, block.source, "text/plain");
    if (!response) {
        return passthrough(block, "render-server-unreachable: " +
                                      httplib::to_string(response.error()));
    }
    if (response->status != 200 || response->body.empty()) {
        return passthrough(block, "render-server-error (HTTP " +
                                      std::to_string(response->status) + ")");
    }

    const std::string rel = "images/" + diagram_image_name(block.section_index, block.ordinal);
    if (!write_image(out_dir / rel, response->body)) {
        return passthrough(block, "image-write-failed");
    }
    RenderOutcome outcome;
    outcome.block = block;
    outcome.status = RenderStatus::Rendered;
    outcome.image_rel_path = rel;
    return outcome;
}

} // namespace

ExtractedDiagrams extract_diagrams(const IntermediateDocument& doc) {
    ExtractedDiagrams result;
    const auto lines = split_lines(doc.markdown);

    int current_section = 0;
    std::map<int, int> ordinals;

    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& line = lines[i];
        if (const auto heading = parse_section_heading(line.text)) {
            current_section = *heading;
            ++i;
            continue;
        }
        if (is_fence_open(line.text)) {
            std::size_t j = i + 1;
            while (j < lines.size() && !is_fence_close(lines[j].text)) {
                ++j;
            }
            DiagramBlock block;
            block.section_index = current_section;
            block.ordinal = ordinals[current_section]++;
            block.span_begin = line.begin;
            block.span_end = j < lines.size() ? lines[j].end : doc.markdown.size();
            block.fence_text =
                doc.markdown.substr(block.span_begin, block.span_end - block.span_begin);

            const std::size_t body_begin = line.end + 1;
            const std::size_t body_end = j < lines.size() ? lines[j].begin : doc.markdown.size();
            block.source = body_begin < body_end
                               ? trim(std::string_view(doc.markdown).substr(body_begin,
                                                                            body_end - body_begin))
                               : std::string{};
            result.blocks.push_back(std::move(block));
            i = j + 1;
            continue;
        }
        if (line.text.find("@startuml") != std::string_view::npos) {
            result.warnings.push_back("ignored @startuml outside a labeled fence (offset " +
                                      std::to_string(line.begin) + ")");
        }
        ++i;
    }
    return result;
}

std::optional<std::string> validate_diagram(const DiagramBlock& block) {
    const std::string source = trim(block.source);
    if (source.rfind("@startuml", 0) != 0) {
        return "missing-start-marker";
    }
    constexpr std::string_view kEnd = "@enduml";
    if (source.size() < kEnd.size() ||
        source.compare(source.size() - kEnd.size(), kEnd.size(), kEnd) != 0) {
        return "unterminated";
    }

    // Body between the markers must hold at least one non-blank line.
    const auto first_newline = source.find('\n');
    const std::string body =
        first_newline == std::string::npos
            ? std::string{}
            : source.substr(first_newline + 1, source.size() - kEnd.size() - first_newline - 1);
    if (trim(body).empty()) {
        return "empty-body";
    }

    // Brace/bracket balance outside double-quoted strings.
    int brace_depth = 0;
    int bracket_depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const char c = source[i];
        if (in_string) {
            if (c == '\\' && i + 1 < source.size()) {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        switch (c) {
        case '"': in_string = true; break;
        case '{': ++brace_depth; break;
        case '}': --brace_depth; break;
        case '[': ++bracket_depth; break;
        case ']': --bracket_depth; break;
        default: break;
        }
        if (brace_depth < 0 || bracket_depth < 0) {
            return "unbalanced-delimiters";
        }
    }
    if (brace_depth != 0 || bracket_depth != 0) {
        return "unbalanced-delimiters";
    }
    return std::nullopt;
}

std::string diagram_image_name(int section_index, int ordinal) {
    return "section-" + std::to_string(section_index) + "-diagram-" + std::to_string(ordinal) +
           ".png";
}

RenderOutcome render(const DiagramBlock& block, const RendererConfig& config,
                     const fs::path& out_dir) {
    switch (config.mode) {
    case RenderMode::None: return passthrough(block, "rendering-disabled");
    case RenderMode::External: return render_external(block, config, out_dir);
    case RenderMode::Server: return render_server(block, config, out_dir);
    }
    return passthrough(block, "rendering-disabled");
}

ArchitectureDocument substitute(const IntermediateDocument& doc,
                                const std::vector<RenderOutcome>& outcomes) {
    std::vector<const RenderOutcome*> ordered;
    ordered.reserve(outcomes.size());
    for (const auto& outcome : outcomes) {
        ordered.push_back(&outcome);
    }
    std::sort(ordered.begin(), ordered.end(), [](const RenderOutcome* a, const RenderOutcome* b) {
        return a->block.span_begin > b->block.span_begin;
    });

    ArchitectureDocument result;
    result.markdown = doc.markdown;

    std::size_t previous_begin = std::string::npos;
    for (const auto* outcome : ordered) {
        const auto& block = outcome->block;
        if (block.span_end > result.markdown.size() || block.span_begin >= block.span_end ||
            (previous_begin != std::string::npos && block.span_end > previous_begin)) {
            throw SpanMismatch("diagram spans are inconsistent with the document");
        }
        if (result.markdown.compare(block.span_begin, block.span_end - block.span_begin,
                                    block.fence_text) != 0) {
            throw SpanMismatch("document bytes changed under diagram span at offset " +
                               std::to_string(block.span_begin));
        }

        std::string replacement;
        if (outcome->status == RenderStatus::Rendered) {
            replacement = "![Section " + std::to_string(block.section_index) + " diagram](" +
                          outcome->image_rel_path + ")";
            result.image_rel_paths.push_back(outcome->image_rel_path);
        } else {
            replacement = "<!-- diagram not rendered: " + outcome->reason + " -->\n" +
                          block.fence_text;
        }
        result.markdown.replace(block.span_begin, block.span_end - block.span_begin, replacement);
        previous_begin = block.span_begin;
    }

    std::reverse(result.image_rel_paths.begin(), result.image_rel_paths.end());
    return result;
}

} // namespace ciao
