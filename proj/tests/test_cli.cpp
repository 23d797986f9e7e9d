#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "leanopt/cli.hpp"
#include "leanopt/lp_format.hpp"
#include "leanopt/solver.hpp"

using namespace leanopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kRoot = LEANOPT_SOURCE_DIR;

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("leanopt_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

// config pointing the pipeline at the repo's prompt/reference assets
fs::path scripted_config(const fs::path& dir, const std::string& transcript) {
    fs::path cfg = dir / "config.txt";
    write(cfg, "backend = scripted\n"
               "transcript = " + transcript + "\n"
               "prompts = " + kRoot + "/data/prompts\n"
               "refdata = " + kRoot + "/data/refdata\n");
    return cfg;
}

const std::string kGolden = kRoot + "/data/transcripts/benchmark_golden.json";

// every required key of the shipped schema is present in the output
void check_schema(const std::string& schema_name, const json& output) {
    json schema = json::parse(slurp(kRoot + "/docs/schemas/" + schema_name + ".schema.json"));
    for (const auto& key : schema.at("required"))
        CHECK_MESSAGE(output.contains(key.get<std::string>()),
                      schema_name << " output missing " << key);
}

}  // namespace

TEST_CASE("config files parse with env overrides and reject secrets") {
    fs::path dir = fresh_dir("config");
    fs::path cfg = dir / "c.txt";
    write(cfg, "# comment\nbackend = remote\nendpoint = https://api.example/v1\n"
               "timeout_seconds = 30\nmax_steps = 4\n");
    Config c = load_config(cfg.string());
    CHECK(c.backend == "remote");
    CHECK(c.endpoint == "https://api.example/v1");
    CHECK(c.timeout_seconds == 30);
    CHECK(c.max_steps == 4);
    CHECK(c.refdata == "data/refdata");  // untouched default

    setenv("LEAN_OPT_BACKEND", "scripted", 1);
    setenv("LEAN_OPT_REFDATA", "/elsewhere", 1);
    apply_env_overrides(c);
    CHECK(c.backend == "scripted");
    CHECK(c.refdata == "/elsewhere");
    unsetenv("LEAN_OPT_BACKEND");
    unsetenv("LEAN_OPT_REFDATA");

    write(cfg, "unknown_thing = 1\n");
    CHECK_THROWS_WITH_AS(load_config(cfg.string()), doctest::Contains("unknown_thing"),
                         ConfigError);
    write(cfg, "timeout_seconds = soon\n");
    CHECK_THROWS_AS(load_config(cfg.string()), ConfigError);
    write(cfg, "no equals sign\n");
    CHECK_THROWS_AS(load_config(cfg.string()), ConfigError);
    // credentials never live in config files
    write(cfg, "api_key = sk-123\n");
    CHECK_THROWS_WITH_AS(load_config(cfg.string()), doctest::Contains("environment-only"),
                         ConfigError);
    CHECK_THROWS_AS(load_config((dir / "missing.txt").string()), ConfigError);
}

TEST_CASE("transcript files load as arrays or id-keyed objects") {
    fs::path dir = fresh_dir("replies");
    write(dir / "flat.json", R"(["one", "two"])");
    auto flat = load_replies((dir / "flat.json").string(), "ignored");
    CHECK(flat == std::vector<std::string>{"one", "two"});
    write(dir / "keyed.json", R"({"a": ["x"], "b": ["y", "z"]})");
    CHECK(load_replies((dir / "keyed.json").string(), "b").size() == 2);
    CHECK_THROWS_WITH_AS(load_replies((dir / "keyed.json").string(), "c"),
                         doctest::Contains("no run id 'c'"), CliError);
    write(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(load_replies((dir / "bad.json").string(), ""), CliError);
    write(dir / "numbers.json", "[1, 2]");
    CHECK_THROWS_AS(load_replies((dir / "numbers.json").string(), ""), CliError);
}

TEST_CASE("backend construction enforces the config invariants") {
    Config scripted;  // default backend, no transcript
    CHECK_THROWS_WITH_AS(make_backend(scripted, ""), doctest::Contains("transcript"),
                         ConfigError);
    Config remote;
    remote.backend = "remote";
    CHECK_THROWS_WITH_AS(make_backend(remote, ""), doctest::Contains("endpoint"), ConfigError);
    remote.endpoint = "https://api.example/v1";
    unsetenv("LEAN_OPT_API_KEY");
    CHECK_THROWS_WITH_AS(make_backend(remote, ""), doctest::Contains("LEAN_OPT_API_KEY"),
                         ConfigError);
    setenv("LEAN_OPT_API_KEY", "test-token", 1);
    CHECK(make_backend(remote, "") != nullptr);
    unsetenv("LEAN_OPT_API_KEY");
    Config weird;
    weird.backend = "psychic";
    CHECK_THROWS_AS(make_backend(weird, ""), ConfigError);
}

TEST_CASE("usage errors exit 2, domain errors exit 1, help exits 0") {
    CHECK(run({}).code == 2);
    CHECK(run({"--no-such-flag"}).code == 2);
    CHECK(run({"classify"}).code == 2);  // missing required positional
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--help"}).out.find("Subcommands") != std::string::npos);

    auto missing = run({"solve", "/no/such/file.lp"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("/no/such/file.lp") != std::string::npos);

    fs::path dir = fresh_dir("badcfg");
    write(dir / "bad.txt", "nonsense = 1\n");
    auto bad = run({"--config", (dir / "bad.txt").string(), "solve", "x.lp"});
    CHECK(bad.code == 2);
}

TEST_CASE("classify replays the stored demo to a type and a trace") {
    fs::path dir = fresh_dir("classify");
    fs::path cfg = scripted_config(dir, kRoot + "/data/transcripts/classify_demo.json");
    std::string query = kRoot + "/data/transcripts/classify_demo_query.txt";

    auto r = run({"--config", cfg.string(), "--out", dir.string(), "classify", query});
    CHECK(r.code == 0);
    CHECK(r.out.find("Network Revenue Management") != std::string::npos);
    CHECK(slurp(dir / "classify_trace.txt").find("Final Answer") != std::string::npos);

    auto j = run({"--config", cfg.string(), "--out", dir.string(), "--json", "classify", query});
    CHECK(j.code == 0);
    json parsed = json::parse(j.out);
    CHECK(parsed.at("code") == "NRM");
    CHECK(parsed.at("fallback") == false);
    check_schema("classify", parsed);
}

TEST_CASE("formulate replays the stored truck run to the label value") {
    fs::path dir = fresh_dir("formulate");
    fs::path cfg = scripted_config(dir, kGolden);
    auto r = run({"--config", cfg.string(), "--out", dir.string(), "--json", "formulate",
                  kRoot + "/data/benchmark/truck/query.txt", "--data",
                  kRoot + "/data/benchmark/truck", "--transcript-id", "truck"});
    REQUIRE(r.code == 0);
    json parsed = json::parse(r.out);
    CHECK(parsed.at("type") == "Resource Allocation");
    CHECK(parsed.at("workflow") == "tailored");
    CHECK(parsed.at("status") == "optimal");
    CHECK(parsed.at("objective").get<double>() == doctest::Approx(14300));
    check_schema("formulate", parsed);

    // the emitted LP file independently solves to the label value
    LinearModel model = read_lp(slurp(dir / "model.lp"));
    Solution sol = solve_milp(model);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(14300));

    // replaying the same transcript is bit-reproducible
    std::string first = slurp(dir / "pipeline.json");
    auto again = run({"--config", cfg.string(), "--out", dir.string(), "--json", "formulate",
                      kRoot + "/data/benchmark/truck/query.txt", "--data",
                      kRoot + "/data/benchmark/truck", "--transcript-id", "truck"});
    CHECK(again.code == 0);
    CHECK(slurp(dir / "pipeline.json") == first);
}

TEST_CASE("forced agnostic formulation compiles a scripted plan") {
    fs::path dir = fresh_dir("agnostic");
    const char* plan = R"(["------------Abstract Model Plan Start------------
5. Identify Parameters (from CSV Schema):
- set i = rows of cost.csv
- set j = columns of cost.csv
- C = matrix of cost.csv
- s = column 'Supply Units' of supply.csv
- d = column 'Demand Units' of demand.csv
6. Formulate Objective: min sum_i sum_j C_{i,j} * x_{i,j}
7. Formulate Constraints:
- Supply: sum_j x_{i,j} <= s_i, forall i
- Demand: sum_i x_{i,j} >= d_j, forall j
------------Abstract Model Plan End------------"])";
    std::string escaped;
    for (char c : std::string(plan)) {
        if (c == '\n') escaped += "\\n";
        else escaped += c;
    }
    write(dir / "plan.json", escaped);
    fs::path cfg = scripted_config(dir, (dir / "plan.json").string());
    auto r = run({"--config", cfg.string(), "--out", dir.string(), "--json", "formulate",
                  kRoot + "/data/benchmark/routes-lp/query.txt", "--data",
                  kRoot + "/data/benchmark/routes-lp", "--agnostic"});
    REQUIRE(r.code == 0);
    json parsed = json::parse(r.out);
    CHECK(parsed.at("workflow") == "agnostic");
    CHECK(parsed.at("objective").get<double>() == doctest::Approx(780));
    // the plan-writing prompt is captured as an artifact
    CHECK(slurp(dir / "plan.txt").find("Abstract Model Plan") != std::string::npos);
}

TEST_CASE("solve prints status and values with flag-controlled exit") {
    fs::path dir = fresh_dir("solve");
    write(dir / "tiny.lp", "Maximize\n obj: x\nSubject To\n c1: x <= 5\nEnd\n");
    auto r = run({"--json", "solve", (dir / "tiny.lp").string()});
    CHECK(r.code == 0);
    json parsed = json::parse(r.out);
    CHECK(parsed.at("status") == "optimal");
    CHECK(parsed.at("objective") == 5.0);
    CHECK(parsed.at("values").at("x") == 5.0);
    check_schema("solve", parsed);

    write(dir / "empty.lp", "Maximize\n obj: x\nSubject To\n c1: x <= -1\n c2: x >= 1\nEnd\n");
    auto infeasible = run({"solve", (dir / "empty.lp").string()});
    CHECK(infeasible.code == 1);
    CHECK(infeasible.out.find("infeasible") != std::string::npos);
    auto tolerated = run({"solve", (dir / "empty.lp").string(), "--allow-nonoptimal"});
    CHECK(tolerated.code == 0);
}

TEST_CASE("evaluate replays the stored benchmark to a perfect report") {
    fs::path dir = fresh_dir("evaluate");
    fs::path cfg = scripted_config(dir, kGolden);
    auto r = run({"--config", cfg.string(), "--out", dir.string(), "--json", "evaluate",
                  kRoot + "/data/benchmark", "--repetitions", "3"});
    REQUIRE(r.code == 0);
    json parsed = json::parse(r.out);
    CHECK(parsed.at("accuracy") == 1.0);
    CHECK(parsed.at("em_match") == 1.0);
    CHECK(parsed.at("repetitions") == 3);
    CHECK(parsed.at("runs") == 9);
    check_schema("evaluate", parsed);
    json report = json::parse(slurp(dir / "report.json"));
    CHECK(report.at("results").size() == 9);
    CHECK(slurp(dir / "report.txt").find("Overall") != std::string::npos);

    // rerunning reproduces the report byte for byte
    std::string first = slurp(dir / "report.json");
    auto again = run({"--config", cfg.string(), "--out", dir.string(), "evaluate",
                      kRoot + "/data/benchmark"});
    CHECK(again.code == 0);
    json single = json::parse(slurp(dir / "report.json"));
    CHECK(single.at("accuracy") == 1.0);

    auto bad = run({"--config", cfg.string(), "evaluate", "/no/such/benchmark"});
    CHECK(bad.code == 1);
}

TEST_CASE("datagen nrm emits the fixed header and is seed-deterministic") {
    fs::path dir = fresh_dir("datagen");
    write(dir / "sales.csv",
          "Product Name,Units Sold,Unit Price\nAir Max,120,150.0\nPegasus,80,120.0\n");
    auto r = run({"--out", (dir / "a").string(), "--json", "datagen", "nrm", "--sales",
                  (dir / "sales.csv").string(), "--seed", "7"});
    REQUIRE(r.code == 0);
    check_schema("datagen", json::parse(r.out));
    std::string csv = slurp(dir / "a/nrm.csv");
    CHECK(csv.rfind("Product Name,Revenue,Demand,Initial Inventory", 0) == 0);

    auto again = run({"--out", (dir / "b").string(), "datagen", "nrm", "--sales",
                      (dir / "sales.csv").string(), "--seed", "7"});
    CHECK(again.code == 0);
    CHECK(slurp(dir / "b/nrm.csv") == csv);  // byte-identical per seed
    auto other = run({"--out", (dir / "c").string(), "datagen", "nrm", "--sales",
                      (dir / "sales.csv").string(), "--seed", "8"});
    CHECK(other.code == 0);
    CHECK(slurp(dir / "c/nrm.csv") != csv);

    auto bad_seed = run({"datagen", "nrm", "--sales", (dir / "sales.csv").string(), "--seed",
                         "not-a-number"});
    CHECK(bad_seed.code == 2);
    write(dir / "wrong.csv", "Item,Count\nA,1\n");
    auto bad_cols = run({"datagen", "nrm", "--sales", (dir / "wrong.csv").string()});
    CHECK(bad_cols.code == 1);
    CHECK(bad_cols.err.find("Product Name") != std::string::npos);
}

TEST_CASE("datagen tp and flp write their tables") {
    fs::path dir = fresh_dir("datagen2");
    write(dir / "locations.csv",
          "Name,Lat,Lon\nChicago,41.88,-87.63\nDallas,32.78,-96.80\n"
          "Atlanta,33.75,-84.39\nDenver,39.74,-104.99\n");
    auto tp = run({"--out", dir.string(), "--json", "datagen", "tp", "--locations",
                   (dir / "locations.csv").string(), "--cost-per-mile", "1.2", "1.6"});
    REQUIRE(tp.code == 0);
    json files = json::parse(tp.out);
    CHECK(files.at("files").size() == 3);
    std::string cost = slurp(dir / "cost.csv");
    CHECK(cost.rfind("Source,", 0) == 0);
    CHECK(slurp(dir / "suppliers.csv").rfind("Name,Lat,Lon", 0) == 0);

    auto flp = run({"--out", dir.string(), "datagen", "flp", "--n", "3", "--min", "100",
                    "--max", "900"});
    CHECK(flp.code == 0);
    std::string setup = slurp(dir / "setup_costs.csv");
    CHECK(setup.rfind("Facility,Setup Cost", 0) == 0);
    CHECK(setup.find("F3") != std::string::npos);
}

TEST_CASE("sblp build writes the sales LP with consumption coefficients") {
    fs::path dir = fresh_dir("sblp");
    auto r = run({"--out", dir.string(), "--json", "sblp", "build", "--data",
                  kRoot + "/data/sblp"});
    REQUIRE(r.code == 0);
    json parsed = json::parse(r.out);
    CHECK(parsed.at("status") == "optimal");
    CHECK(parsed.at("variables") == 38);
    check_schema("sblp", parsed);

    // the stored flight data consumes 2 flexi / 1 lite seat units
    LinearModel model = read_lp(slurp(dir / "sblp.lp"));
    const Constraint* cap = nullptr;
    for (const auto& c : model.constraints)
        if (c.name == "cap_A_B_11_20") cap = &c;
    REQUIRE(cap);
    double flexi = 0, lite = 0;
    for (const auto& t : cap->expr.terms) {
        if (t.var.find("Eco_flexi") != std::string::npos) flexi = t.coeff;
        if (t.var.find("Eco_lite") != std::string::npos) lite = t.coeff;
    }
    CHECK(flexi == 2.0);
    CHECK(lite == 1.0);

    // the override flag replaces the coefficients
    auto bumped = run({"--out", (dir / "o").string(), "sblp", "build", "--data",
                       kRoot + "/data/sblp", "--consumption", "Eco-flexi=3,Eco-lite=1"});
    CHECK(bumped.code == 0);
    LinearModel over = read_lp(slurp(dir / "o/sblp.lp"));
    for (const auto& c : over.constraints)
        if (c.name == "cap_A_B_11_20")
            for (const auto& t : c.expr.terms)
                if (t.var.find("Eco_flexi") != std::string::npos) CHECK(t.coeff == 3.0);

    auto bad_fare = run({"sblp", "build", "--data", kRoot + "/data/sblp", "--consumption",
                         "Business=5"});
    CHECK(bad_fare.code == 1);
    CHECK(bad_fare.err.find("Business") != std::string::npos);
}

TEST_CASE("sblp plan honors the flight budget and names missing inputs") {
    fs::path dir = fresh_dir("sblpplan");
    auto r = run({"--out", dir.string(), "--json", "sblp", "plan", "--data",
                  kRoot + "/data/sblp", "--z", "9", "--no-solve"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("budget") == 9);
    LinearModel model = read_lp(slurp(dir / "plan.lp"));
    const Constraint* budget = nullptr;
    for (const auto& c : model.constraints)
        if (c.name == "flight_budget") budget = &c;
    REQUIRE(budget);
    CHECK(budget->rhs == 9.0);
    CHECK(budget->sense == Sense::Le);
    CHECK(budget->expr.terms.size() == 17);  // one slot per candidate flight

    fs::path partial = fresh_dir("sblpmissing");
    for (const char* f : {"flights.csv", "od_demand.csv", "v1.csv"})
        fs::copy_file(kRoot + "/data/sblp/" + std::string(f), partial / f);
    auto missing = run({"sblp", "build", "--data", partial.string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("v2.csv") != std::string::npos);
}
