#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ciao/comment_stripper.hpp"
#include "ciao/diagram.hpp"
#include "ciao/doc_template.hpp"
#include "ciao/flatten.hpp"
#include "ciao/language.hpp"
#include "ciao/llm.hpp"
#include "ciao/pipeline.hpp"
#include "ciao/prompt.hpp"
#include "ciao/version.hpp"

namespace py = pybind11;

namespace {

const ciao::LanguageKind& kind_by_name(const std::string& name) {
    for (const auto tag : ciao::known_languages()) {
        if (name == ciao::language_name(tag)) {
            return ciao::language_kind(tag);
        }
    }
    if (name == "unknown") {
        return ciao::language_kind(ciao::Language::Unknown);
    }
    throw std::invalid_argument("unknown language name: '" + name + "'");
}

std::string flatten_repository_py(const std::string& root, std::size_t max_file_bytes,
                                  bool strip) {
    ciao::FilterConfig cfg = ciao::FilterConfig::defaults();
    cfg.max_file_bytes = max_file_bytes;
    cfg.strip_comments = strip;
    return ciao::flatten_repository(root, cfg).serialize();
}

std::string accumulate_cost_py(
    const std::vector<std::tuple<std::string, std::int64_t, std::int64_t>>& calls,
    const std::string& model_id, const std::string& prices_json) {
    std::vector<ciao::CostCall> cost_calls;
    cost_calls.reserve(calls.size());
    for (const auto& [label, input_tokens, output_tokens] : calls) {
        cost_calls.push_back({label, input_tokens, output_tokens});
    }
    const auto report =
        ciao::accumulate_cost(cost_calls, model_id, ciao::PriceTable::parse(prices_json));

    nlohmann::json j;
    j["per_call"] = nlohmann::json::array();
    for (const auto& line : report.per_call) {
        j["per_call"].push_back({{"label", line.label},
                                 {"input_tokens", line.input_tokens},
                                 {"output_tokens", line.output_tokens},
                                 {"usd", line.usd.to_string(4)}});
    }
    j["total_usd"] = report.total_usd.to_string(4);
    j["total_input_tokens"] = report.total_input_tokens;
    j["total_output_tokens"] = report.total_output_tokens;
    return j.dump();
}

std::vector<std::tuple<int, int, std::string>> extract_diagrams_py(const std::string& markdown) {
    const auto extracted = ciao::extract_diagrams(ciao::IntermediateDocument{markdown});
    std::vector<std::tuple<int, int, std::string>> out;
    out.reserve(extracted.blocks.size());
    for (const auto& block : extracted.blocks) {
        out.emplace_back(block.section_index, block.ordinal, block.source);
    }
    return out;
}

std::optional<std::string> validate_diagram_py(const std::string& source) {
    ciao::DiagramBlock block;
    block.source = source;
    return ciao::validate_diagram(block);
}

int generate_py(const std::string& source, const std::string& out_dir,
                const std::optional<std::string>& mock_script,
                const std::optional<std::string>& template_path, const std::string& model,
                int jobs, bool dry_run, std::optional<std::int64_t> clock_epoch,
                const std::optional<std::string>& prices, std::size_t max_context_tokens) {
    ciao::RunConfig cfg;
    cfg.source = source;
    cfg.out_dir = out_dir;
    cfg.model_id = model;
    cfg.jobs = jobs;
    cfg.dry_run = dry_run;
    if (mock_script) {
        cfg.mock_script = *mock_script;
    }
    if (template_path) {
        cfg.template_path = *template_path;
    }
    if (prices) {
        cfg.prices_path = *prices;
    }
    cfg.clock_epoch = clock_epoch;
    cfg.budget.max_input_tokens = max_context_tokens;

    std::ostringstream out;
    std::ostringstream err;
    const int code = ciao::run(cfg, out, err);
    if (code != 0) {
        py::print(err.str());
    }
    return code;
}

} // namespace

PYBIND11_MODULE(_ciao, m) {
    m.doc() = "Core operations of the ciao architecture documentation generator";

    m.def(
        "detect_language",
        [](const std::string& rel_path) {
            return std::string(ciao::language_name(ciao::detect_language(rel_path).tag));
        },
        py::arg("rel_path"), "Map a repository-relative path to its language name.");

    m.def(
        "strip_comments",
        [](const std::string& text, const std::string& language) {
            return ciao::strip_comments(text, kind_by_name(language));
        },
        py::arg("text"), py::arg("language"),
        "Strip comments from source text; `language` is a name from detect_language().");

    m.def(
        "strip_comments_for_path",
        [](const std::string& text, const std::string& rel_path) {
            return ciao::strip_comments(text, ciao::detect_language(rel_path));
        },
        py::arg("text"), py::arg("rel_path"));

    m.def("flatten_repository", &flatten_repository_py, py::arg("root"),
          py::arg("max_file_bytes") = std::size_t{512 * 1024}, py::arg("strip_comments") = true,
          "Flatten a repository into the single deterministic text artifact.");

    m.def("default_template_json",
          [] { return ciao::serialize_template(ciao::default_template()); });

    m.def(
        "validate_template_json",
        [](const std::string& text) { return ciao::validate_template(ciao::parse_template(text)); },
        py::arg("text"));

    m.def("build_global_prompt",
          [] { return ciao::build_global_prompt(ciao::GlobalPromptConfig::defaults()); });

    m.def(
        "build_section_prompt",
        [](int index) {
            const auto t = ciao::default_template();
            for (const auto& section : t.sections) {
                if (section.index == index) {
                    return ciao::build_section_prompt(section);
                }
            }
            throw std::out_of_range("no default template section with index " +
                                    std::to_string(index));
        },
        py::arg("index"));

    m.def(
        "estimate_tokens",
        [](const std::string& text, std::size_t chars_per_token) {
            return ciao::estimate_tokens(text, chars_per_token);
        },
        py::arg("text"), py::arg("chars_per_token") = std::size_t{4});

    m.def("accumulate_cost", &accumulate_cost_py, py::arg("calls"), py::arg("model_id"),
          py::arg("prices_json"),
          "Price (label, input_tokens, output_tokens) calls; returns a JSON report string.");

    m.def("extract_diagrams", &extract_diagrams_py, py::arg("markdown"),
          "Return (section_index, ordinal, source) for every fenced plantuml block.");

    m.def("validate_diagram", &validate_diagram_py, py::arg("source"),
          "None when valid, else the rejection reason.");

    m.def("generate", &generate_py, py::arg("source"), py::arg("out_dir"),
          py::arg("mock_script") = std::nullopt, py::arg("template_path") = std::nullopt,
          py::arg("model") = "gpt-5", py::arg("jobs") = 8, py::arg("dry_run") = false,
          py::arg("clock_epoch") = std::nullopt, py::arg("prices") = std::nullopt,
          py::arg("max_context_tokens") = std::size_t{200000},
          "Run the full pipeline; returns the process exit code.");

#ifdef CIAO_VERSION_INFO
    m.attr("__version__") = CIAO_VERSION_INFO;
#else
    m.attr("__version__") = ciao::kToolVersion;
#endif
}
