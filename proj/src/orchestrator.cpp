#include "ciao/orchestrator.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <semaphore>
#include <thread>

#include "ciao/errors.hpp"
#include "ciao/version.hpp"

namespace ciao {

namespace {

struct FenceScan {
    int count = 0;
    bool all_have_markers = true;
};

// Counts line-start ```plantuml fences and whether each body carries the
// @startuml/@enduml pair.
FenceScan scan_plantuml_fences(const std::string& markdown) {
    FenceScan scan;
    std::size_t pos = 0;
    while (pos <= markdown.size()) {
        const auto line_end = markdown.find('\n', pos);
        const std::string_view line(markdown.data() + pos,
                                    (line_end == std::string::npos ? markdown.size() : line_end) -
                                        pos);
        if (line.rfind("```plantuml", 0) == 0) {
            const std::size_t body_start =
                line_end == std::string::npos ? markdown.size() : line_end + 1;
            std::size_t close = markdown.find("\n```", body_start > 0 ? body_start - 1 : 0);
            std::string body;
            if (close == std::string::npos) {
                body = markdown.substr(body_start);
                pos = markdown.size() + 1;
            } else {
                body = markdown.substr(body_start, close + 1 - body_start);
                const auto after = markdown.find('\n', close + 1);
                pos = after == std::string::npos ? markdown.size() + 1 : after + 1;
            }
            ++scan.count;
            if (body.find("@startuml") == std::string::npos ||
                body.find("@enduml") == std::string::npos) {
                scan.all_have_markers = false;
            }
            continue;
        }
        if (line_end == std::string::npos) {
            break;
        }
        pos = line_end + 1;
    }
    return scan;
}

bool has_line_starting_with(const std::string& markdown, const std::string& prefix) {
    if (markdown.rfind(prefix, 0) == 0) {
        return true;
    }
    return markdown.find("\n" + prefix) != std::string::npos;
}

// The repair instruction goes after the full original prompt, where it is
// closest to the completion point.
CompletionRequest request_for(const PromptBundle& bundle, const GenerationOptions& options,
                              const std::string& extra_instruction = {}) {
    CompletionRequest request;
    request.model_id = options.model_id;
    request.system_text = bundle.global_part;
    request.user_text = bundle.section_part;
    request.user_text.append("\n\n").append(bundle.context_part);
    if (!extra_instruction.empty()) {
        request.user_text.append("\n\n").append(extra_instruction);
    }
    request.max_output_tokens = options.max_output_tokens;
    request.temperature = options.temperature;
    request.label = bundle.section_id;
    return request;
}

std::string trim_trailing_whitespace(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\t' ||
                             text.back() == '\r')) {
        text.pop_back();
    }
    return text;
}

void dump_partial_sections(const std::filesystem::path& debug_dir,
                           const std::vector<GeneratedSection>& sections,
                           const std::vector<unsigned char>& completed) {
    if (debug_dir.empty()) {
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(debug_dir, ec);
    if (ec) {
        return;
    }
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (!completed[i]) {
            continue;
        }
        const auto path = debug_dir / (std::to_string(sections[i].index) + "-" +
                                       sections[i].section_id + ".md");
        std::ofstream out(path, std::ios::binary);
        out << sections[i].markdown;
    }
}

} // namespace

std::vector<std::string> validate_section(const GeneratedSection& section,
                                          const TemplateSection& spec) {
    std::vector<std::string> warnings;
    const std::string required_heading =
        "## " + std::to_string(spec.index) + ". " + spec.title;
    if (!has_line_starting_with(section.markdown, required_heading)) {
        warnings.push_back("missing-heading");
    }
    const auto scan = scan_plantuml_fences(section.markdown);
    if (spec.diagram && scan.count == 0) {
        warnings.push_back("missing-diagram");
    }
    if (scan.count > 0 && !scan.all_have_markers) {
        warnings.push_back("diagram-missing-markers");
    }
    return warnings;
}

GeneratedSection regenerate_if_invalid(GeneratedSection section, const TemplateSection& spec,
                                       Provider& provider, const PromptBundle& bundle,
                                       const GenerationOptions& options) {
    if (section.warnings.empty()) {
        return section;
    }

    std::string corrective = "Your previous response violated these rules:";
    for (const auto& warning : section.warnings) {
        corrective.append(" ").append(warning).append(";");
    }
    corrective.append(" rewrite the section and satisfy every output requirement exactly.");

    const auto request = request_for(bundle, options, corrective);
    const auto started = options.clock->now_ms();
    const auto result = complete(request, provider, options.retry);

    GeneratedSection repaired;
    repaired.section_id = section.section_id;
    repaired.index = section.index;
    repaired.markdown = result.text;
    repaired.input_tokens = section.input_tokens + result.input_tokens;
    repaired.output_tokens = section.output_tokens + result.output_tokens;
    repaired.duration_ms = section.duration_ms + (options.clock->now_ms() - started);
    repaired.warnings = validate_section(repaired, spec);
    return repaired;
}

std::vector<GeneratedSection> generate_all(const DocumentationTemplate& doc_template,
                                           const FlattenedRepository& flat, Provider& provider,
                                           int jobs, const GenerationOptions& options) {
    if (jobs < 1) {
        throw std::invalid_argument("jobs must be at least 1");
    }
    const auto violations = validate_template(doc_template);
    if (!violations.empty()) {
        throw TemplateInvalid("refusing to generate from an invalid template");
    }

    const std::size_t count = doc_template.sections.size();
    std::vector<GeneratedSection> sections(count);
    std::vector<unsigned char> completed(count, 0); // not vector<bool>: workers write concurrently
    std::vector<std::string> failures(count);
    std::counting_semaphore<> slots(jobs);
    std::vector<std::thread> workers;
    workers.reserve(count);

    for (std::size_t i = 0; i < count; ++i) {
        workers.emplace_back([&, i] {
            slots.acquire();
            const auto& spec = doc_template.sections[i];
            try {
                const auto bundle = build_bundle(spec, options.global_cfg, flat, options.budget);
                const auto request = request_for(bundle, options);
                const auto started = options.clock->now_ms();
                const auto result = complete(request, provider, options.retry);

                GeneratedSection section;
                section.section_id = spec.id;
                section.index = spec.index;
                section.markdown = result.text;
                section.input_tokens = result.input_tokens;
                section.output_tokens = result.output_tokens;
                section.duration_ms = options.clock->now_ms() - started;
                section.warnings = validate_section(section, spec);
                if (!section.warnings.empty()) {
                    section = regenerate_if_invalid(std::move(section), spec, provider, bundle,
                                                    options);
                }
                sections[i] = std::move(section);
                completed[i] = 1;
            } catch (const std::exception& err) {
                failures[i] = err.what();
            }
            slots.release();
        });
    }
    for (auto& worker : workers) {
        worker.join();
    }

    for (std::size_t i = 0; i < count; ++i) {
        if (!completed[i]) {
            dump_partial_sections(options.debug_dir, sections, completed);
            throw SectionGenerationFailed(doc_template.sections[i].id, failures[i]);
        }
    }
    return sections;
}

IntermediateDocument assemble(const std::vector<GeneratedSection>& sections,
                              const DocumentationTemplate& doc_template,
                              const GenerationMeta& meta) {
    std::map<int, const GeneratedSection*> by_index;
    for (const auto& section : sections) {
        if (!by_index.emplace(section.index, &section).second) {
            throw DuplicateSection(section.index);
        }
    }
    for (const auto& spec : doc_template.sections) {
        if (by_index.find(spec.index) == by_index.end()) {
            throw MissingSection(spec.index);
        }
    }
    if (by_index.size() != doc_template.sections.size()) {
        throw std::invalid_argument("sections carry indices outside the template");
    }

    std::string out = "# Architecture Documentation\n\n";
    out.append("_Generated by ").append(kToolName).append(" v").append(meta.tool_version);
    out.append(" | model: ").append(meta.model_id);
    out.append(" | ").append(meta.timestamp).append("_\n");

    for (const auto& spec : doc_template.sections) {
        out.append("\n---\n\n");
        out.append(trim_trailing_whitespace(by_index.at(spec.index)->markdown));
        out.push_back('\n');
    }

    out.append("\n---\n\n_End of generated documentation (");
    out.append(meta.model_id).append(", ").append(meta.timestamp).append(", ");
    out.append(kToolName).append(" v").append(meta.tool_version).append(")._\n");

    return IntermediateDocument{std::move(out)};
}

} // namespace ciao
