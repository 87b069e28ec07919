#include "ciao/prompt.hpp"

#include <algorithm>
#include <set>

#include "ciao/errors.hpp"

namespace ciao {

namespace {

constexpr const char* kDelimiter = "================\n";

std::string omission_marker(const std::string& rel_path) {
    return "[omitted for length: " + rel_path + "]\n\n";
}

std::size_t rendered_block_size(const FileBlock& block) {
    std::size_t size = 0;
    size += 17;                          // delimiter line
    size += 6 + block.rel_path.size() + 1; // "File: <rel>\n"
    size += 17;                          // delimiter line
    size += block.content.size();
    if (!block.content.empty() && block.content.back() != '\n') {
        size += 1;
    }
    size += 1; // trailing blank line
    return size;
}

std::string serialize_with_omissions(const FlattenedRepository& flat,
                                     const std::set<std::string>& omitted) {
    std::string out = flat.header;
    out.push_back('\n');
    out.append(flat.structure_block);
    if (!flat.file_blocks.empty()) {
        out.push_back('\n');
    }
    for (const auto& block : flat.file_blocks) {
        if (omitted.count(block.rel_path) != 0) {
            out.append(omission_marker(block.rel_path));
            continue;
        }
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

} // namespace

GlobalPromptConfig GlobalPromptConfig::defaults() {
    GlobalPromptConfig cfg;
    cfg.role_line =
        "You are a Meticulous Software Architect documenting an existing software system.";
    cfg.audience =
        "software developers who need a consolidated, system-level understanding of the "
        "repository.";
    cfg.grounding_rules = {
        "Base every statement on evidence in the repository provided at the end of this "
        "prompt, citing concrete files, directories, or configuration entries where helpful.",
        "Do not invent or speculate about architectural elements that are not present in "
        "the repository.",
        "When the repository offers no evidence for a requested aspect, say so explicitly "
        "instead of guessing.",
    };
    cfg.style_rules = {
        "Write in clear, professional English using standard software-architecture "
        "terminology.",
        "Use Markdown and keep exactly to the headings requested in the instructions.",
        "Prefer short paragraphs and bulleted lists over long prose.",
    };
    cfg.motivation_line =
        "Work carefully and deliberately; maintainers will rely on this documentation.";
    return cfg;
}

std::string PromptBundle::concatenated() const {
    return global_part + "\n\n" + section_part + "\n\n" + context_part;
}

std::string build_global_prompt(const GlobalPromptConfig& cfg) {
    std::string out = cfg.role_line;
    out.append("\n\nAudience: ").append(cfg.audience);
    out.append("\n\nGrounding rules:\n");
    for (const auto& rule : cfg.grounding_rules) {
        out.append("- ").append(rule).push_back('\n');
    }
    out.append("\nStyle rules:\n");
    for (const auto& rule : cfg.style_rules) {
        out.append("- ").append(rule).push_back('\n');
    }
    if (!cfg.motivation_line.empty()) {
        out.append("\n").append(cfg.motivation_line);
    }
    return out;
}

const std::string& default_skeleton(DiagramKind kind) {
    static const std::string use_case = "@startuml\n"
                                        "actor User\n"
                                        "rectangle \"System\" {\n"
                                        "  usecase \"Primary use case\" as UC1\n"
                                        "}\n"
                                        "User --> UC1\n"
                                        "@enduml";
    static const std::string component = "@startuml\n"
                                         "package \"System\" {\n"
                                         "  [Application]\n"
                                         "  [Data Store]\n"
                                         "}\n"
                                         "[Application] --> [Data Store] : reads/writes\n"
                                         "@enduml";
    static const std::string code_level = "@startuml\n"
                                          "folder \"src\" {\n"
                                          "  file \"entry_point\"\n"
                                          "  file \"core_module\"\n"
                                          "}\n"
                                          "\"entry_point\" --> \"core_module\"\n"
                                          "@enduml";
    static const std::string deployment = "@startuml\n"
                                          "node \"Host\" {\n"
                                          "  artifact \"Service\"\n"
                                          "}\n"
                                          "database \"Storage\"\n"
                                          "\"Service\" --> \"Storage\"\n"
                                          "@enduml";
    switch (kind) {
    case DiagramKind::UseCase: return use_case;
    case DiagramKind::Component: return component;
    case DiagramKind::CodeLevel: return code_level;
    case DiagramKind::Deployment: return deployment;
    }
    return component;
}

std::string build_section_prompt(const TemplateSection& section,
                                 const std::optional<std::string>& few_shot) {
    std::string out = "Write section " + std::to_string(section.index) + " (\"" + section.title +
                      "\") of the architecture documentation.";
    out.append("\n\nGoal: ").append(section.goal);
    out.append("\n\nOutput requirements:\n");
    out.append("- Begin with the exact Markdown heading: `## " + std::to_string(section.index) +
               ". " + section.title + "`.\n");
    for (std::size_t i = 0; i < section.subsection_titles.size(); ++i) {
        out.append("- Include the subsection heading `### " + std::to_string(section.index) + "." +
                   std::to_string(i + 1) + " " + section.subsection_titles[i] + "`.\n");
    }
    if (section.diagram) {
        out.append("- Under the `### " + std::to_string(section.index) +
                   ".1` heading, include exactly one PlantUML diagram in a fenced code block "
                   "labeled `plantuml`; the diagram source must start with `@startuml` and end "
                   "with `@enduml`.\n");
    }

    std::optional<std::string> skeleton = few_shot;
    if (!skeleton && section.diagram) {
        skeleton = default_skeleton(*section.diagram);
    }
    if (skeleton) {
        out.append("\nUse this skeleton as a structural guide:\n");
        out.append(*skeleton);
    }
    return out;
}

std::size_t estimate_tokens(std::string_view text, std::size_t chars_per_token) {
    if (chars_per_token == 0) {
        throw std::invalid_argument("chars_per_token must be positive");
    }
    return (text.size() + chars_per_token - 1) / chars_per_token;
}

std::string apply_budget(const FlattenedRepository& flat, std::size_t fixed_overhead_tokens,
                         const TokenBudget& budget) {
    if (budget.max_input_tokens == 0 || budget.chars_per_token == 0) {
        throw std::invalid_argument("token budget must be positive");
    }

    const auto fits = [&](std::size_t chars) {
        const std::size_t tokens = (chars + budget.chars_per_token - 1) / budget.chars_per_token;
        return tokens + fixed_overhead_tokens <= budget.max_input_tokens;
    };

    // Drop order: non-always-keep first, then always-keep; within each group
    // largest content first, ties broken by descending path for determinism.
    std::vector<const FileBlock*> drop_order;
    drop_order.reserve(flat.file_blocks.size());
    for (const auto& block : flat.file_blocks) {
        drop_order.push_back(&block);
    }
    std::stable_sort(drop_order.begin(), drop_order.end(),
                     [](const FileBlock* a, const FileBlock* b) {
                         if (a->always_keep != b->always_keep) {
                             return !a->always_keep;
                         }
                         if (a->content.size() != b->content.size()) {
                             return a->content.size() > b->content.size();
                         }
                         return a->rel_path > b->rel_path;
                     });

    std::size_t size = flat.header.size() + 1 + flat.structure_block.size();
    if (!flat.file_blocks.empty()) {
        size += 1;
    }
    for (const auto& block : flat.file_blocks) {
        size += rendered_block_size(block);
    }

    std::set<std::string> omitted;
    if (fits(size)) {
        return serialize_with_omissions(flat, omitted);
    }
    for (const auto* block : drop_order) {
        size -= rendered_block_size(*block);
        size += omission_marker(block->rel_path).size();
        omitted.insert(block->rel_path);
        if (fits(size)) {
            return serialize_with_omissions(flat, omitted);
        }
    }
    throw BudgetTooSmall("structure tree alone exceeds the token budget (" +
                         std::to_string(budget.max_input_tokens) + " tokens)");
}

PromptBundle build_bundle(const TemplateSection& section, const GlobalPromptConfig& global_cfg,
                          const FlattenedRepository& flat, const TokenBudget& budget) {
    PromptBundle bundle;
    bundle.section_id = section.id;
    bundle.global_part = build_global_prompt(global_cfg);
    bundle.section_part = build_section_prompt(section);

    const std::size_t prefix_chars =
        bundle.global_part.size() + 2 + bundle.section_part.size() + 2;
    const std::size_t overhead =
        (prefix_chars + budget.chars_per_token - 1) / budget.chars_per_token;

    bundle.context_part = apply_budget(flat, overhead, budget);
    bundle.total_estimated_tokens =
        overhead + estimate_tokens(bundle.context_part, budget.chars_per_token);
    return bundle;
}

} // namespace ciao
