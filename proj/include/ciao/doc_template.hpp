#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ciao {

enum class DiagramKind { UseCase, Component, CodeLevel, Deployment };

enum class C4Level { L1, L2, L3, L4 };

const char* diagram_kind_name(DiagramKind kind);
const char* c4_level_name(C4Level level);

struct TemplateSection {
    int index = 0; // 1-based, contiguous within a template
    std::string id;
    std::string title;
    std::string goal;
    std::optional<C4Level> c4_level;
    std::optional<DiagramKind> diagram;
    std::vector<std::string> subsection_titles;

    bool operator==(const TemplateSection&) const = default;
};

struct DocumentationTemplate {
    std::vector<TemplateSection> sections;
    std::string writing_guidelines;

    bool operator==(const DocumentationTemplate&) const = default;
};

/// The built-in eight-section template: System Overview, Architectural
/// Context (L1), Containers (L2), Components (L3), Code-Level (L4),
/// Cross-Cutting Concerns, Quality Attributes and Rationale, Deployment.
/// Diagram slots sit at subsections 2.1, 3.1, 5.1 and 8.1.
DocumentationTemplate default_template();

/// Parses the JSON template format. Throws TemplateSyntax on malformed JSON,
/// TemplateInvalid when the parsed value fails validate_template.
DocumentationTemplate parse_template(const std::string& text);

std::string serialize_template(const DocumentationTemplate& t);

/// Returns human-readable violations; empty means valid. Checks index
/// contiguity, id uniqueness, non-empty goals, and that a diagram implies a
/// subsection slot.
std::vector<std::string> validate_template(const DocumentationTemplate& t);

} // namespace ciao
