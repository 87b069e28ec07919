#include "ciao/doc_template.hpp"

#include <set>

#include <json.hpp>

#include "ciao/errors.hpp"

namespace ciao {

namespace {

using nlohmann::json;

std::optional<C4Level> c4_level_from_name(const std::string& name) {
    if (name == "L1") return C4Level::L1;
    if (name == "L2") return C4Level::L2;
    if (name == "L3") return C4Level::L3;
    if (name == "L4") return C4Level::L4;
    return std::nullopt;
}

std::optional<DiagramKind> diagram_kind_from_name(const std::string& name) {
    if (name == "use-case") return DiagramKind::UseCase;
    if (name == "component") return DiagramKind::Component;
    if (name == "code-level") return DiagramKind::CodeLevel;
    if (name == "deployment") return DiagramKind::Deployment;
    return std::nullopt;
}

TemplateSection section_from_json(const json& j) {
    TemplateSection s;
    s.index = j.at("index").get<int>();
    s.id = j.at("id").get<std::string>();
    s.title = j.at("title").get<std::string>();
    s.goal = j.at("goal").get<std::string>();
    if (j.contains("c4_level") && !j["c4_level"].is_null()) {
        const auto name = j["c4_level"].get<std::string>();
        s.c4_level = c4_level_from_name(name);
        if (!s.c4_level) {
            throw TemplateInvalid("unknown c4_level: " + name);
        }
    }
    if (j.contains("diagram") && !j["diagram"].is_null()) {
        const auto name = j["diagram"].get<std::string>();
        s.diagram = diagram_kind_from_name(name);
        if (!s.diagram) {
            throw TemplateInvalid("unknown diagram kind: " + name);
        }
    }
    if (j.contains("subsections")) {
        s.subsection_titles = j["subsections"].get<std::vector<std::string>>();
    }
    return s;
}

const char* kDefaultGuidelines =
    "Write for software developers who need a consolidated, system-level view of the "
    "repository. Ground every statement in the provided source; never name an element "
    "that is absent from the repository. Use precise software-architecture terminology, "
    "keep sections focused on their stated goal, and prefer concise paragraphs and "
    "bulleted lists over long prose.";

} // namespace

const char* diagram_kind_name(DiagramKind kind) {
    switch (kind) {
    case DiagramKind::UseCase: return "use-case";
    case DiagramKind::Component: return "component";
    case DiagramKind::CodeLevel: return "code-level";
    case DiagramKind::Deployment: return "deployment";
    }
    return "unknown";
}

const char* c4_level_name(C4Level level) {
    switch (level) {
    case C4Level::L1: return "L1";
    case C4Level::L2: return "L2";
    case C4Level::L3: return "L3";
    case C4Level::L4: return "L4";
    }
    return "unknown";
}

DocumentationTemplate default_template() {
    DocumentationTemplate t;
    t.writing_guidelines = kDefaultGuidelines;

    t.sections.push_back({1, "system-overview", "System Overview",
                          "Summarize the system's purpose, scope, and main responsibilities, "
                          "giving readers an entry point to the architecture before the more "
                          "technical views.",
                          std::nullopt, std::nullopt, {}});
    t.sections.push_back({2, "architectural-context", "Architectural Context",
                          "Characterize the system's external environment: the actors, "
                          "interacting systems, APIs, and data sources it depends on, and the "
                          "boundaries that separate the system from that environment.",
                          C4Level::L1, DiagramKind::UseCase, {"Use Case Diagram"}});
    t.sections.push_back({3, "containers", "Containers",
                          "Describe the logical runtime organization: the applications and "
                          "data stores that must be running for the system to operate, each "
                          "with its responsibilities, exposed interfaces, key technologies, "
                          "and interaction patterns.",
                          C4Level::L2, DiagramKind::Component, {"Component Diagram"}});
    t.sections.push_back({4, "components", "Components",
                          "Present the internal logical structure: the key modules, packages, "
                          "or classes and the structural relationships among them, showing how "
                          "domain responsibilities are grouped.",
                          C4Level::L3, std::nullopt, {}});
    t.sections.push_back({5, "code-level", "Code-Level",
                          "Map architectural elements to their concrete implementation: the "
                          "relevant directories, files, entry points, and recurring design "
                          "patterns that realize them.",
                          C4Level::L4, DiagramKind::CodeLevel, {"Code-Level Diagram"}});
    t.sections.push_back({6, "cross-cutting-concerns", "Cross-Cutting Concerns",
                          "Summarize concerns that influence multiple parts of the system, "
                          "such as security, configuration, logging, testing, and monitoring, "
                          "and describe how each manifests in the codebase.",
                          std::nullopt, std::nullopt, {}});
    t.sections.push_back({7, "quality-attributes-and-rationale", "Quality Attributes and Rationale",
                          "Highlight the quality attributes the implementation supports, such "
                          "as performance, maintainability, scalability, security, and "
                          "synthesize the rationale inferred from observable design choices.",
                          std::nullopt, std::nullopt, {}});
    t.sections.push_back({8, "deployment", "Deployment",
                          "Characterize the operational infrastructure: deployment artifacts "
                          "such as Dockerfiles and configuration files, execution "
                          "environments, storage and compute nodes, and how software elements "
                          "map onto them.",
                          std::nullopt, DiagramKind::Deployment, {"Deployment Diagram"}});
    return t;
}

DocumentationTemplate parse_template(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw TemplateSyntax(std::string("template is not valid JSON: ") + err.what());
    }

    DocumentationTemplate t;
    try {
        t.writing_guidelines = j.value("writing_guidelines", std::string{});
        if (!j.contains("sections") || !j["sections"].is_array()) {
            throw TemplateInvalid("template requires a 'sections' array");
        }
        for (const auto& section_json : j["sections"]) {
            t.sections.push_back(section_from_json(section_json));
        }
    } catch (const json::exception& err) {
        throw TemplateSyntax(std::string("template schema violation: ") + err.what());
    }

    const auto violations = validate_template(t);
    if (!violations.empty()) {
        std::string message = "invalid template:";
        for (const auto& v : violations) {
            message.append(" [").append(v).append("]");
        }
        throw TemplateInvalid(message);
    }
    return t;
}

std::string serialize_template(const DocumentationTemplate& t) {
    json j;
    j["writing_guidelines"] = t.writing_guidelines;
    j["sections"] = json::array();
    for (const auto& s : t.sections) {
        json sj;
        sj["index"] = s.index;
        sj["id"] = s.id;
        sj["title"] = s.title;
        sj["goal"] = s.goal;
        if (s.c4_level) {
            sj["c4_level"] = c4_level_name(*s.c4_level);
        }
        if (s.diagram) {
            sj["diagram"] = diagram_kind_name(*s.diagram);
        }
        if (!s.subsection_titles.empty()) {
            sj["subsections"] = s.subsection_titles;
        }
        j["sections"].push_back(std::move(sj));
    }
    return j.dump(2) + "\n";
}

std::vector<std::string> validate_template(const DocumentationTemplate& t) {
    std::vector<std::string> violations;
    if (t.sections.empty()) {
        violations.push_back("no sections");
        return violations;
    }

    std::set<int> indices;
    std::set<std::string> ids;
    for (const auto& s : t.sections) {
        if (!indices.insert(s.index).second) {
            violations.push_back("duplicate index " + std::to_string(s.index));
        }
        if (!ids.insert(s.id).second) {
            violations.push_back("duplicate id '" + s.id + "'");
        }
        if (s.goal.empty()) {
            violations.push_back("section " + std::to_string(s.index) + " has an empty goal");
        }
        if (s.diagram && s.subsection_titles.empty()) {
            violations.push_back("section " + std::to_string(s.index) +
                                 " requires a diagram but has no subsection slot");
        }
    }

    for (int expected = 1; expected <= static_cast<int>(t.sections.size()); ++expected) {
        if (indices.find(expected) == indices.end()) {
            violations.push_back("indices are not contiguous: missing " + std::to_string(expected));
            break;
        }
    }
    return violations;
}

} // namespace ciao
