#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ciao/doc_template.hpp"
#include "ciao/flatten.hpp"

namespace ciao {

/// The prompt part shared across all sections: role, audience, grounding and
/// style rules. `grounding_rules` must stay non-empty and must include a rule
/// forbidding elements absent from the repository.
struct GlobalPromptConfig {
    std::string role_line;
    std::string audience;
    std::vector<std::string> grounding_rules;
    std::vector<std::string> style_rules;
    std::string motivation_line;

    static GlobalPromptConfig defaults();
};

struct TokenBudget {
    std::size_t max_input_tokens = 200000;
    std::size_t chars_per_token = 4;
};

/// Composite prompt for one section. Concatenation order is always
/// global_part, section_part, context_part.
struct PromptBundle {
    std::string section_id;
    std::string global_part;
    std::string section_part;
    std::string context_part;
    std::size_t total_estimated_tokens = 0;

    std::string concatenated() const;
};

std::string build_global_prompt(const GlobalPromptConfig& cfg);

/// Section instructions: goal verbatim, the required `## <index>. <title>`
/// heading, the diagram requirement when one is configured, and the few-shot
/// skeleton when supplied (defaulting to a built-in skeleton per diagram kind).
std::string build_section_prompt(const TemplateSection& section,
                                 const std::optional<std::string>& few_shot = std::nullopt);

/// Built-in minimal diagram source used as the few-shot skeleton.
const std::string& default_skeleton(DiagramKind kind);

/// ceil(char_count / chars_per_token)
std::size_t estimate_tokens(std::string_view text, std::size_t chars_per_token = 4);

/// Fits the flattened repository into `budget` minus `fixed_overhead_tokens`.
/// When truncation is needed, file blocks are dropped largest-first (always
/// -keep files last, the structure tree never), each replaced by the marker
/// line `[omitted for length: <rel_path>]`. Throws BudgetTooSmall when even
/// the structure tree alone exceeds the budget.
std::string apply_budget(const FlattenedRepository& flat, std::size_t fixed_overhead_tokens,
                         const TokenBudget& budget);

PromptBundle build_bundle(const TemplateSection& section, const GlobalPromptConfig& global_cfg,
                          const FlattenedRepository& flat, const TokenBudget& budget);

} // namespace ciao
