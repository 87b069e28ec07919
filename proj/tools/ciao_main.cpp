#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ciao/pipeline.hpp"
#include "ciao/version.hpp"

namespace {

ciao::RenderMode parse_render_mode(const std::string& value) {
    if (value == "external") {
        return ciao::RenderMode::External;
    }
    if (value == "server") {
        return ciao::RenderMode::Server;
    }
    return ciao::RenderMode::None;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ciao - generate system-level architecture documentation from a repository"};
    app.set_version_flag("--version", std::string(ciao::kToolName) + " " + ciao::kToolVersion);
    app.require_subcommand(1);

    auto* generate = app.add_subcommand(
        "generate", "Flatten a repository, generate the documentation sections, render diagrams");

    ciao::RunConfig cfg;
    std::string render_mode = "none";
    std::string out_dir = "./ciao-out";
    std::string template_path;
    std::string report_path;
    std::string mock_script;
    std::string prices_path;
    long long clock_epoch = -1;
    long long max_context_tokens = 0;

    generate->add_option("source", cfg.source, "Local repository path or Git URL")->required();
    generate->add_option("--out", out_dir, "Output directory (default ./ciao-out)");
    generate->add_option("--model", cfg.model_id, "Model identifier (default gpt-5)");
    generate->add_option("--template", template_path, "Template JSON file");
    generate->add_option("--render", render_mode, "Diagram rendering mode: external|server|none")
        ->check(CLI::IsMember({"external", "server", "none"}));
    generate->add_option("--renderer-cmd", cfg.renderer.command,
                         "PlantUML-compatible renderer executable (external mode)");
    generate->add_option("--renderer-url", cfg.renderer.url,
                         "Rendering HTTP endpoint (server mode)");
    generate->add_option("--max-context-tokens", max_context_tokens,
                         "Input token budget per prompt (default 200000)");
    generate->add_option("--jobs", cfg.jobs, "Maximum concurrent section generations (default 8)");
    generate->add_flag("--dry-run", cfg.dry_run,
                       "Write prompt bundles to <out>/prompts and stop before any network use");
    generate->add_option("--report", report_path, "Report path (default <out>/report.json)");
    generate->add_flag("--emit-readme", cfg.emit_readme,
                       "Append a link to the generated document to the repository README");
    generate->add_option("--mock-script", mock_script,
                         "Use the deterministic mock provider driven by this JSON script");
    generate->add_option("--prices", prices_path,
                         "Price table JSON (USD per million tokens per model)");
    generate->add_option("--clock-epoch", clock_epoch,
                         "Fixed clock (seconds since epoch) for reproducible output");
    std::string flatten_dump;
    generate->add_option("--dump-flattened", flatten_dump,
                         "Also write the flattened repository artifact to this path");
    generate->add_option("--max-output-tokens", cfg.max_output_tokens,
                         "Completion token cap per section (default 8192)");
    generate->add_option("--temperature", cfg.temperature, "Sampling temperature (default 0.2)")
        ->check(CLI::Range(0.0, 2.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.out_dir = out_dir;
    cfg.renderer.mode = parse_render_mode(render_mode);
    if (!template_path.empty()) {
        cfg.template_path = template_path;
    }
    if (!report_path.empty()) {
        cfg.report_path = report_path;
    }
    if (!mock_script.empty()) {
        cfg.mock_script = mock_script;
    }
    if (!prices_path.empty()) {
        cfg.prices_path = prices_path;
    }
    if (clock_epoch >= 0) {
        cfg.clock_epoch = clock_epoch;
    }
    if (!flatten_dump.empty()) {
        cfg.flatten_dump_path = flatten_dump;
    }
    if (max_context_tokens > 0) {
        cfg.budget.max_input_tokens = static_cast<std::size_t>(max_context_tokens);
    }

    return ciao::run(cfg, std::cout, std::cerr);
}
