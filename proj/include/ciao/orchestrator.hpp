#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ciao/clock.hpp"
#include "ciao/doc_template.hpp"
#include "ciao/flatten.hpp"
#include "ciao/llm.hpp"
#include "ciao/prompt.hpp"

namespace ciao {

struct GeneratedSection {
    std::string section_id;
    int index = 0;
    std::string markdown;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t duration_ms = 0;
    std::vector<std::string> warnings;
};

struct GenerationMeta {
    std::string model_id;
    std::string timestamp;
    std::string tool_version;
};

struct IntermediateDocument {
    std::string markdown;
};

struct GenerationOptions {
    GlobalPromptConfig global_cfg = GlobalPromptConfig::defaults();
    TokenBudget budget;
    std::string model_id = "gpt-5";
    int max_output_tokens = 8192;
    double temperature = 0.2;
    RetryPolicy retry;
    std::shared_ptr<Clock> clock = Clock::system();
    /// When non-empty, partial results are dumped here if the run aborts.
    std::filesystem::path debug_dir;
};

/// Generates every template section from its own prompt bundle, with at most
/// `jobs` provider calls in flight at once. A hard gateway failure on any
/// section aborts the whole run with SectionGenerationFailed after dumping
/// the sections that did complete to `debug_dir`.
std::vector<GeneratedSection> generate_all(const DocumentationTemplate& doc_template,
                                           const FlattenedRepository& flat, Provider& provider,
                                           int jobs, const GenerationOptions& options);

/// Shape checks against the template: `missing-heading` when the required
/// `## <index>. <title>` line is absent, `missing-diagram` when a required
/// plantuml fence is absent, `diagram-missing-markers` when a fence lacks
/// @startuml/@enduml.
std::vector<std::string> validate_section(const GeneratedSection& section,
                                          const TemplateSection& spec);

/// Issues at most one repair call when the section fails validation: the
/// original prompt plus a corrective instruction listing the violated rules.
/// The second result is accepted regardless, with remaining warnings kept.
GeneratedSection regenerate_if_invalid(GeneratedSection section, const TemplateSection& spec,
                                       Provider& provider, const PromptBundle& bundle,
                                       const GenerationOptions& options);

/// Assembles bodies in template-index order regardless of completion order.
/// Throws MissingSection / DuplicateSection on cardinality violations.
IntermediateDocument assemble(const std::vector<GeneratedSection>& sections,
                              const DocumentationTemplate& doc_template,
                              const GenerationMeta& meta);

} // namespace ciao
