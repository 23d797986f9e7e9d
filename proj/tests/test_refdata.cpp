#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include "leanopt/grammar.hpp"
#include "leanopt/refdata.hpp"
#include "leanopt/solver.hpp"

using namespace leanopt;
namespace fs = std::filesystem;

namespace {

const std::string kRefDir = std::string(LEANOPT_SOURCE_DIR) + "/data/refdata";
const std::string kBenchDir = std::string(LEANOPT_SOURCE_DIR) + "/data/benchmark";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("leanopt-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("problem type codes and names round-trip") {
    for (ProblemType t : kAllProblemTypes) {
        CHECK(parse_type(type_code(t)) == t);
        CHECK(parse_type(type_name(t)) == t);
    }
    CHECK(parse_type("Network Revenue Management.") == ProblemType::NRM);
    CHECK(parse_type("  resource allocation ") == ProblemType::RA);
    CHECK(parse_type("Inventory Management Problem") == std::nullopt);
}

TEST_CASE("seed reference store loads with per-type counts") {
    RefStore store = load_refdata(kRefDir);
    CHECK(store.entries.size() == 8);
    for (ProblemType t : kAllProblemTypes) CHECK(store.type_counts.at(t) == 1);
    const RefEntry* nike = store.find("nrm-nike");
    REQUIRE(nike != nullptr);
    CHECK(nike->t == ProblemType::NRM);
    CHECK(nike->g == "Nike x OliviaKim brand");
    CHECK(nike->q.find("Nike shoes") != std::string::npos);
    CHECK(nike->m.find("Objective Function:") == 0);
    CHECK(store.find("no-such-id") == nullptr);
}

TEST_CASE("every seed label with retrieved information solves") {
    RefStore store = load_refdata(kRefDir);
    for (const auto& entry : store.entries) {
        INFO("entry ", entry.id);
        LinearModel m = parse_model_grammar(entry.m);
        Solution s = solve_milp(m);
        CHECK(s.status == SolveStatus::Optimal);
    }
}

TEST_CASE("missing entry file is reported with its id") {
    TempDir tmp;
    write(tmp.path / "manifest.json",
          R"({"kind":"refdata","entries":[{"id":"ghost","type":"RA","dir":"ghost"}]})");
    try {
        load_refdata(tmp.path.string());
        FAIL("expected an error");
    } catch (const RefError& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("unparseable label text is rejected at load") {
    TempDir tmp;
    write(tmp.path / "manifest.json",
          R"({"kind":"refdata","entries":[{"id":"bad","type":"RA","dir":"bad"}]})");
    write(tmp.path / "bad/query.txt", "q");
    write(tmp.path / "bad/formatted.txt", "f");
    write(tmp.path / "bad/label.txt",
          "Objective Function:\nmax nonsense %%\n\nConstraints:\n\nRetrieved Information:\n");
    CHECK_THROWS_AS(load_refdata(tmp.path.string()), RefError);
}

TEST_CASE("benchmark fixtures load with resolvable datasets") {
    auto instances = load_benchmark(kBenchDir);
    REQUIRE(instances.size() == 3);
    const auto& nike = instances[0];
    CHECK(nike.id == "nike");
    CHECK(nike.declared_type == ProblemType::NRM);
    CHECK(nike.label_optimal == 1516456.0);
    CHECK(nike.approx_tokens > 100);
    for (const auto& p : nike.dataset_paths) CHECK(fs::exists(p));
    CHECK(instances[2].label_is_lp);
    LinearModel lp = instances[2].label_model();
    CHECK(lp.variables.size() == 6);
}

TEST_CASE("duplicate benchmark ids are rejected") {
    TempDir tmp;
    write(tmp.path / "manifest.json", R"({"kind":"benchmark","instances":[
        {"id":"a","type":"RA","dir":"a","optimal":1},
        {"id":"a","type":"RA","dir":"a","optimal":1}]})");
    write(tmp.path / "a/query.txt", "q");
    write(tmp.path / "a/label.lp", "Maximize\n obj: x\nSubject To\n c1: x <= 1\nEnd\n");
    CHECK_THROWS_AS(load_benchmark(tmp.path.string()), RefError);
}

TEST_CASE("dangling dataset path is rejected") {
    TempDir tmp;
    write(tmp.path / "manifest.json", R"({"kind":"benchmark","instances":[
        {"id":"a","type":"RA","dir":"a","optimal":1,"datasets":["gone.csv"]}]})");
    write(tmp.path / "a/query.txt", "q");
    write(tmp.path / "a/label.lp", "Maximize\n obj: x\nSubject To\n c1: x <= 1\nEnd\n");
    CHECK_THROWS_AS(load_benchmark(tmp.path.string()), RefError);
}

TEST_CASE("validate_instance accepts the shipped fixtures") {
    for (const auto& inst : load_benchmark(kBenchDir)) {
        INFO("instance ", inst.id);
        ValidationReport report = validate_instance(inst);
        CHECK(report.value_ok);
        // the truck model legitimately has alternate optima (two trucks share
        // a unit cost), which the perturbation probe is expected to surface
        if (inst.id != "truck") CHECK(!report.uniqueness_suspect);
        else CHECK(report.uniqueness_suspect);
    }
}

TEST_CASE("validate_instance flags a corrupted stored optimal") {
    auto instances = load_benchmark(kBenchDir);
    BenchmarkInstance bad = instances[0];
    bad.label_optimal += 500.0;
    ValidationReport report = validate_instance(bad);
    CHECK(!report.value_ok);
    CHECK(report.solved_value == doctest::Approx(1516456.0));
}

TEST_CASE("validate_instance suspects non-unique optima on a symmetric model") {
    // max x + y s.t. x + y <= 2: every point on the face is optimal
    BenchmarkInstance inst;
    inst.id = "degenerate";
    inst.label_text =
        "Maximize\n obj: x + y\nSubject To\n c1: x + y <= 2\nEnd\n";
    inst.label_is_lp = true;
    inst.label_optimal = 2.0;
    ValidationReport report = validate_instance(inst);
    CHECK(report.value_ok);
    CHECK(report.uniqueness_suspect);
}

TEST_CASE("token proxy is character count over four") {
    CHECK(approx_tokens("12345678") == 2);
    CHECK(approx_tokens("") == 0);
    CHECK(approx_tokens(std::string(801 * 4, 'a')) == 801);
}
