#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ciao/orchestrator.hpp"

namespace ciao {

/// One fenced `plantuml` block found in the intermediate document. `span`
/// covers the whole fenced block (opening fence line through closing fence
/// line); `source` is the fence body.
struct DiagramBlock {
    int section_index = 0;
    int ordinal = 0; // 0-based within the section
    std::string source;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    std::string fence_text; // exact document bytes inside [span_begin, span_end)
};

enum class RenderStatus { Rendered, Passthrough, Invalid };

struct RenderOutcome {
    DiagramBlock block;
    RenderStatus status = RenderStatus::Passthrough;
    std::string image_rel_path; // set when Rendered
    std::string reason;         // set when Passthrough or Invalid
};

enum class RenderMode { External, Server, None };

struct RendererConfig {
    RenderMode mode = RenderMode::None;
    std::string command; // external renderer executable (PlantUML-compatible CLI)
    std::string url;     // rendering endpoint for Server mode (POST source, PNG back)
};

struct ExtractedDiagrams {
    std::vector<DiagramBlock> blocks;
    std::vector<std::string> warnings;
};

/// Scans for fenced code blocks labeled `plantuml`, in document order, with
/// section attribution from the enclosing `## <n>.` heading. Unfenced
/// @startuml markers outside labeled fences are ignored with a warning.
ExtractedDiagrams extract_diagrams(const IntermediateDocument& doc);

/// nullopt means valid. Reasons: `unterminated`, `missing-start-marker`,
/// `empty-body`, `unbalanced-delimiters`.
std::optional<std::string> validate_diagram(const DiagramBlock& block);

/// Pure naming rule: section-<i>-diagram-<k>.png.
std::string diagram_image_name(int section_index, int ordinal);

/// Renders one validated block. Failures never throw: any renderer problem
/// degrades to Passthrough with the source kept in place. Images land under
/// `out_dir`/images/.
RenderOutcome render(const DiagramBlock& block, const RendererConfig& config,
                     const std::filesystem::path& out_dir);

struct ArchitectureDocument {
    std::string markdown;
    std::vector<std::string> image_rel_paths;
};

/// Replaces Rendered spans with image references and annotates
/// Passthrough/Invalid spans with an HTML comment carrying the reason,
/// leaving every byte outside the spans untouched. Throws SpanMismatch when
/// an outcome's span no longer matches the document.
ArchitectureDocument substitute(const IntermediateDocument& doc,
                                const std::vector<RenderOutcome>& outcomes);

} // namespace ciao
