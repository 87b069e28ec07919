#include <doctest.h>

#include <sstream>

#include "ciao/errors.hpp"
#include "ciao/pipeline.hpp"
#include "fixture_repo.hpp"
#include "temp_dir.hpp"

using namespace ciao;
using ciao::testing::build_fixture_repo;
using ciao::testing::read_file;
using ciao::testing::TempDir;
using ciao::testing::write_file;

namespace {

RunConfig mock_config(const std::filesystem::path& repo, const std::filesystem::path& out,
                      const std::filesystem::path& script) {
    RunConfig cfg;
    cfg.source = repo.string();
    cfg.out_dir = out;
    cfg.mock_script = script;
    cfg.clock_epoch = 1700000000;
    return cfg;
}

int run_quiet(const RunConfig& cfg, std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(cfg, out, err);
    if (err_text != nullptr) {
        *err_text = err.str();
    }
    return code;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("acquire_repository returns local directories unchanged") {
    TempDir dir;
    const auto repo = AcquiredRepository::open(dir.path().string());
    CHECK(repo.root() == dir.path());
}

TEST_CASE("acquire_repository rejects missing local paths") {
    CHECK_THROWS_AS(AcquiredRepository::open("/nonexistent/ciao-repo"), RepoNotFound);
}

TEST_CASE("unreachable git URLs raise CloneFailed") {
    CHECK_THROWS_AS(AcquiredRepository::open("https://127.0.0.1:1/none/missing.git"),
                    CloneFailed);
}

TEST_CASE("a public repository clones shallowly into a temp dir"
          * doctest::skip(std::getenv("CIAO_NETWORK_TESTS") == nullptr)) {
    std::filesystem::path clone_root;
    {
        const auto repo = AcquiredRepository::open("https://github.com/octocat/Hello-World.git");
        clone_root = repo.root();
        CHECK(std::filesystem::exists(clone_root / ".git"));
    }
    CHECK_FALSE(std::filesystem::exists(clone_root)); // removed on scope exit
}

TEST_CASE("git URL detection") {
    CHECK(looks_like_git_url("https://example.test/a/b.git"));
    CHECK(looks_like_git_url("git@example.test:a/b.git"));
    CHECK(looks_like_git_url("https://example.test/a/b"));
    CHECK_FALSE(looks_like_git_url("/local/path"));
    CHECK_FALSE(looks_like_git_url("relative/dir"));
}

TEST_CASE("duration formatting matches the minute-second style") {
    CHECK(format_duration_ms(0) == "0m 0.00s");
    CHECK(format_duration_ms(180900) == "3m 0.90s");
    CHECK(format_duration_ms(110000) == "1m 50.00s");
}

TEST_CASE("end-to-end mock run writes the document, images dir entries, and report") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");

    const auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    CHECK(run_quiet(cfg) == 0);

    const auto doc = read_file(work.path() / "out/architecture.md");
    for (int i = 1; i <= 8; ++i) {
        CAPTURE(i);
        CHECK(doc.find("## " + std::to_string(i) + ". ") != std::string::npos);
    }
    for (const char* slot : {"### 2.1 ", "### 3.1 ", "### 5.1 ", "### 8.1 "}) {
        CHECK(doc.find(slot) != std::string::npos);
    }
    CHECK(std::filesystem::exists(work.path() / "out/report.json"));
}

TEST_CASE("mock runs are byte-identical across jobs under a fixed clock") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");

    std::string first_doc;
    std::string first_report;
    for (const int jobs : {1, 4, 8}) {
        auto cfg = mock_config(repo, work.path() / ("out" + std::to_string(jobs)),
                               work.path() / "mock.json");
        cfg.jobs = jobs;
        REQUIRE(run_quiet(cfg) == 0);
        const auto doc = read_file(cfg.out_dir / "architecture.md");
        const auto report = read_file(cfg.out_dir / "report.json");
        if (first_doc.empty()) {
            first_doc = doc;
            first_report = report;
        } else {
            CHECK(doc == first_doc);
            CHECK(report == first_report);
        }
    }
}

TEST_CASE("the flatten dump is byte-identical to the in-memory serialization") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");

    auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    cfg.flatten_dump_path = work.path() / "flattened.txt";
    REQUIRE(run_quiet(cfg) == 0);

    const auto dumped = read_file(work.path() / "flattened.txt");
    const auto flat = flatten_repository(repo, cfg.filter);
    CHECK(dumped == flat.serialize());
}

TEST_CASE("dry run writes one prompt bundle per section and nothing else") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);

    RunConfig cfg;
    cfg.source = repo.string();
    cfg.out_dir = work.path() / "out";
    cfg.dry_run = true;
    CHECK(run_quiet(cfg) == 0);

    std::size_t prompt_files = 0;
    for (const auto& entry :
         std::filesystem::directory_iterator(work.path() / "out/prompts")) {
        (void)entry;
        ++prompt_files;
    }
    CHECK(prompt_files == 8);
    CHECK_FALSE(std::filesystem::exists(work.path() / "out/architecture.md"));

    const auto prompt = read_file(work.path() / "out/prompts/section-3-containers.txt");
    CHECK(prompt.find("Meticulous Software Architect") != std::string::npos);
    CHECK(prompt.find("# Flattened Repository") != std::string::npos);
}

TEST_CASE("a custom template drives the section set end to end") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");
    write_file(work.path() / "template.json", R"({
        "writing_guidelines": "Short.",
        "sections": [
            {"index": 1, "id": "overview", "title": "Overview", "goal": "Explain the system."},
            {"index": 2, "id": "runtime", "title": "Runtime View", "goal": "Describe runtime.",
             "c4_level": "L2", "diagram": "component", "subsections": ["Component Diagram"]}
        ]
    })");

    auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    cfg.template_path = work.path() / "template.json";
    REQUIRE(run_quiet(cfg) == 0);

    const auto doc = read_file(work.path() / "out/architecture.md");
    CHECK(doc.find("## 1. Overview") != std::string::npos);
    CHECK(doc.find("## 2. Runtime View") != std::string::npos);
    CHECK(doc.find("### 2.1 Component Diagram") != std::string::npos);
    CHECK(doc.find("## 3. ") == std::string::npos);

    const auto report = read_file(work.path() / "out/report.json");
    CHECK(report.find("\"overview\"") != std::string::npos);
    CHECK(report.find("\"runtime\"") != std::string::npos);
}

TEST_CASE("an invalid template file fails the run with a diagnostic") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");
    write_file(work.path() / "template.json", R"({"sections": []})");

    auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    cfg.template_path = work.path() / "template.json";
    std::string err_text;
    CHECK(run_quiet(cfg, &err_text) == 1);
    CHECK(err_text.find("no sections") != std::string::npos);
}

TEST_CASE("missing credential without mock or dry-run is a usage error naming the variable") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);

    const char* saved = std::getenv("CIAO_API_KEY");
    unsetenv("CIAO_API_KEY");

    RunConfig cfg;
    cfg.source = repo.string();
    cfg.out_dir = work.path() / "out";
    std::string err_text;
    CHECK(run_quiet(cfg, &err_text) == 2);
    CHECK(err_text.find("CIAO_API_KEY") != std::string::npos);

    if (saved != nullptr) {
        setenv("CIAO_API_KEY", saved, 1);
    }
}

TEST_CASE("a section failure surfaces as exit 1 with debug artifacts") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json",
               R"({"code-level": [{"result": "rate-limit"}]})");

    const auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    std::string err_text;
    CHECK(run_quiet(cfg, &err_text) == 1);
    CHECK(err_text.find("code-level") != std::string::npos);
    CHECK(std::filesystem::exists(work.path() / "out/debug"));
}

TEST_CASE("surviving section warnings are carried into the report") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    // every call returns a heading-free body, so repair also fails validation
    write_file(work.path() / "mock.json",
               R"({"system-overview": [{"result": "ok", "text": "prose without a heading"}]})");

    const auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    REQUIRE(run_quiet(cfg) == 0); // accepted with warnings, not fatal

    const auto report = read_file(work.path() / "out/report.json");
    CHECK(report.find("missing-heading") != std::string::npos);
    CHECK(report.find("system-overview") != std::string::npos);
}

TEST_CASE("prices flow into the report when the table knows the model") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");
    write_file(work.path() / "prices.json",
               R"({"gpt-5": {"input_per_million": "1.25", "output_per_million": "10"}})");

    auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    cfg.prices_path = work.path() / "prices.json";
    CHECK(run_quiet(cfg) == 0);

    const auto report = read_file(work.path() / "out/report.json");
    CHECK(report.find("\"usd\"") != std::string::npos);
    CHECK(report.find("0.0000") == std::string::npos); // every section carries real cost
}

TEST_CASE("emit-readme appends a pointer to the repository README") {
    TempDir work;
    const auto repo = work.path() / "repo";
    build_fixture_repo(repo);
    write_file(work.path() / "mock.json", "{}");

    auto cfg = mock_config(repo, work.path() / "out", work.path() / "mock.json");
    cfg.emit_readme = true;
    CHECK(run_quiet(cfg) == 0);

    const auto readme = read_file(repo / "README.md");
    CHECK(readme.find("## Architecture") != std::string::npos);
    CHECK(readme.find("architecture.md") != std::string::npos);
}

TEST_CASE("write_report rejects inconsistent totals before touching the disk") {
    TempDir work;
    RunReport report;
    report.per_section.push_back({"s1", 10, 100, 50, Usd::parse("1")});
    report.total_input_tokens = 100;
    report.total_output_tokens = 50;
    report.total_usd = Usd::parse("2"); // wrong on purpose

    std::ostringstream out;
    CHECK_THROWS_AS(write_report(report, work.path() / "report.json", out), ReportWriteFailed);
    CHECK_FALSE(std::filesystem::exists(work.path() / "report.json"));
}

TEST_CASE("write_report emits 4-digit decimal money and the summary line") {
    TempDir work;
    RunReport report;
    report.started_at = "2026-01-01T00:00:00Z";
    report.finished_at = "2026-01-01T00:03:01Z";
    report.wall_time_ms = 180900;
    report.per_section.push_back({"s1", 10, 100, 50, Usd::parse("1.19")});
    report.total_input_tokens = 100;
    report.total_output_tokens = 50;
    report.total_usd = Usd::parse("1.19");

    std::ostringstream out;
    write_report(report, work.path() / "report.json", out);
    CHECK(out.str() == "total: 3m 0.90s | 1.1900 USD\n");
    CHECK(read_file(work.path() / "report.json").find("\"1.1900\"") != std::string::npos);
}

TEST_CASE("empty per-section list reports zero totals") {
    TempDir work;
    RunReport report;
    report.started_at = "t";
    report.finished_at = "t";
    std::ostringstream out;
    write_report(report, work.path() / "report.json", out);
    CHECK(out.str().find("0.0000 USD") != std::string::npos);
}

} // TEST_SUITE
