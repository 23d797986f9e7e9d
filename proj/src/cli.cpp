#include "leanopt/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leanopt/agents.hpp"
#include "leanopt/datagen.hpp"
#include "leanopt/evalharness.hpp"
#include "leanopt/lp_format.hpp"
#include "leanopt/sblp.hpp"
#include "leanopt/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace leanopt {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write '" + path.string() + "'");
    out << content;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_num(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const char* status_word(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::GapLimit: return "gap_limit";
    }
    return "infeasible";
}

std::vector<CsvTable> load_csv_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw CliError("dataset directory '" + dir + "' not found");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    std::vector<CsvTable> tables;
    for (const auto& p : paths) tables.push_back(read_csv_file(p.string()));
    if (tables.empty()) throw CliError("no CSV files in '" + dir + "'");
    return tables;
}

int int_value(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs an integer, got '" + value + "'");
    }
}

}  // namespace

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        std::string lowered = key;
        for (char& c : lowered) c = (char)std::tolower((unsigned char)c);
        for (const char* banned : {"key", "token", "secret", "password"})
            if (lowered.find(banned) != std::string::npos)
                throw ConfigError("config key '" + key +
                                  "' looks like a credential; secrets are "
                                  "environment-only (LEAN_OPT_API_KEY)");
        if (key == "backend") cfg.backend = value;
        else if (key == "endpoint") cfg.endpoint = value;
        else if (key == "model") cfg.model = value;
        else if (key == "timeout_seconds") cfg.timeout_seconds = int_value(key, value);
        else if (key == "max_steps") cfg.max_steps = int_value(key, value);
        else if (key == "refdata") cfg.refdata = value;
        else if (key == "prompts") cfg.prompts = value;
        else if (key == "transcript") cfg.transcript = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

void apply_env_overrides(Config& config) {
    auto over = [](const char* name, std::string& slot) {
        if (const char* v = std::getenv(name); v && *v) slot = v;
    };
    over("LEAN_OPT_BACKEND", config.backend);
    over("LEAN_OPT_ENDPOINT", config.endpoint);
    over("LEAN_OPT_MODEL", config.model);
    over("LEAN_OPT_REFDATA", config.refdata);
    over("LEAN_OPT_PROMPTS", config.prompts);
    over("LEAN_OPT_TRANSCRIPT", config.transcript);
}

std::vector<std::string> load_replies(const std::string& path, const std::string& id) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw CliError("transcript '" + path + "' is not valid JSON: " + e.what());
    }
    const json* replies = &doc;
    if (doc.is_object()) {
        auto it = doc.find(id);
        if (it == doc.end())
            throw CliError("transcript '" + path + "' has no run id '" + id + "'");
        replies = &*it;
    }
    if (!replies->is_array())
        throw CliError("transcript '" + path + "': replies must be an array of strings");
    std::vector<std::string> out;
    for (const auto& r : *replies) {
        if (!r.is_string())
            throw CliError("transcript '" + path + "': replies must be an array of strings");
        out.push_back(r.get<std::string>());
    }
    return out;
}

std::unique_ptr<ChatBackend> make_backend(const Config& config, const std::string& id) {
    if (config.backend == "scripted") {
        if (config.transcript.empty())
            throw ConfigError("scripted backend needs a transcript file");
        return std::make_unique<ScriptedBackend>(load_replies(config.transcript, id));
    }
    if (config.backend == "remote") {
        if (config.endpoint.empty())
            throw ConfigError("remote backend needs an endpoint");
        const char* token = std::getenv("LEAN_OPT_API_KEY");
        if (!token || !*token)
            throw ConfigError("remote backend needs LEAN_OPT_API_KEY in the environment");
        return std::make_unique<RemoteBackend>(
            RemoteConfig{config.endpoint, config.model, config.timeout_seconds});
    }
    throw ConfigError("unknown backend '" + config.backend + "'");
}

namespace {

int cmd_classify(std::ostream& out, const Config& cfg, bool as_json, const fs::path& out_dir,
                 const std::string& query_file, const std::string& transcript_id) {
    std::string query = read_file(query_file);
    PromptLibrary prompts = load_prompts(cfg.prompts);
    RefStore store = load_refdata(cfg.refdata);
    auto backend = make_backend(cfg, transcript_id);
    ClassifyResult r = classify(*backend, prompts, store, query);
    fs::path trace_path = out_dir / "classify_trace.txt";
    write_file(trace_path, r.trace.to_text());
    if (as_json) {
        json j;
        j["type"] = type_name(r.type);
        j["code"] = type_code(r.type);
        j["fallback"] = r.fallback;
        j["trace_path"] = trace_path.string();
        out << j.dump(2) << "\n";
    } else {
        out << "Problem type: " << type_name(r.type) << "\n";
        if (r.fallback) out << "Warning: answer was outside the list; fell back.\n";
        out << "Trace: " << trace_path.string() << "\n";
    }
    return 0;
}

int cmd_formulate(std::ostream& out, const Config& cfg, bool as_json, const fs::path& out_dir,
                  const std::string& query_file, const std::string& data_dir, bool agnostic,
                  const std::string& transcript_id) {
    std::string query = read_file(query_file);
    std::vector<CsvTable> tables = load_csv_dir(data_dir);
    PromptLibrary prompts = load_prompts(cfg.prompts);
    auto backend = make_backend(cfg, transcript_id);
    PipelineResult result;
    if (agnostic) {
        WorkflowPrompt wf =
            build_agnostic_workflow(prompts, query, csv_schema_snapshot(tables));
        GenerateResult gen = generate_model(*backend, prompts, query, wf, tables);
        result.type = ProblemType::Mixture;
        result.workflow = wf;
        result.model = std::move(gen.model);
        result.answer_text = std::move(gen.answer_text);
        result.traces = std::move(gen.traces);
        write_file(out_dir / "plan.txt", result.workflow.text);
    } else {
        RefStore store = load_refdata(cfg.refdata);
        result = route(*backend, prompts, store, query, tables);
    }
    fs::path model_txt = out_dir / "model.txt";
    fs::path model_lp = out_dir / "model.lp";
    fs::path pipeline_json = out_dir / "pipeline.json";
    write_file(model_txt, result.answer_text);
    write_file(model_lp, write_lp(result.model));
    write_file(pipeline_json, pipeline_to_json(result));
    Solution sol = solve_milp(result.model);
    if (as_json) {
        json j;
        j["type"] = type_name(result.type);
        j["workflow"] = result.workflow.kind == WorkflowPrompt::Kind::Tailored ? "tailored"
                                                                               : "agnostic";
        j["status"] = status_word(sol.status);
        j["objective"] = sol.objective;
        j["model_txt"] = model_txt.string();
        j["model_lp"] = model_lp.string();
        j["pipeline_json"] = pipeline_json.string();
        out << j.dump(2) << "\n";
    } else {
        out << "Problem type: " << type_name(result.type) << "\n"
            << "Variables: " << result.model.variables.size()
            << "  Constraints: " << result.model.constraints.size() << "\n"
            << "Status: " << status_word(sol.status)
            << "  Objective: " << fmt_num(sol.objective) << "\n"
            << "Model: " << model_lp.string() << "\n"
            << "Trace: " << pipeline_json.string() << "\n";
    }
    return 0;
}

int cmd_solve(std::ostream& out, bool as_json, const std::string& lp_file,
              bool allow_nonoptimal) {
    LinearModel model = read_lp(read_file(lp_file));
    Solution sol = solve_milp(model);
    if (as_json) {
        json j;
        j["status"] = status_word(sol.status);
        j["objective"] = sol.objective;
        j["values"] = json::object();
        for (const auto& [name, v] : sol.values) j["values"][name] = v;
        out << j.dump(2) << "\n";
    } else {
        out << "Status: " << status_word(sol.status) << "\n";
        if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapLimit) {
            out << "Objective: " << fmt_num(sol.objective) << "\n";
            for (const auto& [name, v] : sol.values)
                out << "  " << name << " = " << fmt_num(v) << "\n";
        }
    }
    if (sol.status != SolveStatus::Optimal && !allow_nonoptimal) return 1;
    return 0;
}

int cmd_evaluate(std::ostream& out, const Config& cfg, bool as_json, const fs::path& out_dir,
                 const std::string& bench_dir, int repetitions) {
    auto instances = load_benchmark(bench_dir);
    PromptLibrary prompts = load_prompts(cfg.prompts);
    RefStore store = load_refdata(cfg.refdata);
    std::unique_ptr<ChatBackend> shared;  // remote backends are reused across runs
    if (cfg.backend == "remote") shared = make_backend(cfg, "");
    Pipeline pipeline = [&](const BenchmarkInstance& inst) {
        std::vector<CsvTable> tables;
        for (const auto& p : inst.dataset_paths) tables.push_back(read_csv_file(p));
        if (shared) return route(*shared, prompts, store, inst.query, tables);
        auto backend = make_backend(cfg, inst.id);  // fresh replies every run
        return route(*backend, prompts, store, inst.query, tables);
    };
    Report report = run_benchmark(pipeline, instances, repetitions);
    fs::path report_json = out_dir / "report.json";
    fs::path report_txt = out_dir / "report.txt";
    write_file(report_json, report.to_json());
    write_file(report_txt, report.to_text());
    if (as_json) {
        json j;
        j["repetitions"] = report.repetitions;
        j["runs"] = report.results.size();
        j["accuracy"] = report.accuracy;
        j["em_match"] = report.em_match;
        j["em_not_proven"] = report.em_not_proven;
        j["wmape"] = report.wmape_value;
        j["report_json"] = report_json.string();
        j["report_txt"] = report_txt.string();
        out << j.dump(2) << "\n";
    } else {
        out << "Runs: " << report.results.size() << " (" << report.repetitions
            << " repetitions)\n"
            << "Accuracy: " << fmt_num(report.accuracy)
            << "  EM: " << fmt_num(report.em_match)
            << "  WMAPE: " << fmt_num(report.wmape_value) << "\n"
            << "Report: " << report_json.string() << "\n";
    }
    return 0;
}

std::vector<SalesRow> read_sales(const std::string& path) {
    CsvTable t = read_csv_file(path);
    int name = t.column_index("Product Name");
    int units = t.column_index("Units Sold");
    int price = t.column_index("Unit Price");
    if (name < 0 || units < 0 || price < 0)
        throw CliError("sales file '" + path +
                       "' needs columns 'Product Name', 'Units Sold', 'Unit Price'");
    std::vector<SalesRow> rows;
    for (const auto& r : t.rows)
        rows.push_back({r[name], std::stol(r[units]), std::stod(r[price])});
    return rows;
}

std::vector<Location> read_locations(const std::string& path) {
    CsvTable t = read_csv_file(path);
    int name = t.column_index("Name");
    int lat = t.column_index("Lat");
    int lon = t.column_index("Lon");
    if (name < 0 || lat < 0 || lon < 0)
        throw CliError("locations file '" + path + "' needs columns 'Name', 'Lat', 'Lon'");
    std::vector<Location> out;
    for (const auto& r : t.rows)
        out.push_back({r[name], std::stod(r[lat]), std::stod(r[lon])});
    return out;
}

CsvTable locations_to_csv(const std::string& name, const std::vector<Location>& locs) {
    CsvTable t;
    t.name = name;
    t.header = {"Name", "Lat", "Lon"};
    for (const auto& l : locs) t.rows.push_back({l.name, fmt_num(l.lat), fmt_num(l.lon)});
    return t;
}

int emit_files(std::ostream& out, bool as_json, const std::vector<fs::path>& files) {
    if (as_json) {
        json j;
        j["files"] = json::array();
        for (const auto& f : files) j["files"].push_back(f.string());
        out << j.dump(2) << "\n";
    } else {
        for (const auto& f : files) out << "Wrote " << f.string() << "\n";
    }
    return 0;
}

int cmd_datagen_nrm(std::ostream& out, bool as_json, const fs::path& out_dir,
                    const std::string& sales_file, uint64_t seed) {
    auto rows = gen_nrm(read_sales(sales_file), RngSpec{seed});
    fs::path target = out_dir / "nrm.csv";
    write_file(target, write_csv(nrm_to_csv(rows)));
    return emit_files(out, as_json, {target});
}

int cmd_datagen_tp(std::ostream& out, bool as_json, const fs::path& out_dir,
                   const std::string& locations_file, std::vector<double> cost_per_mile,
                   uint64_t seed) {
    if (cost_per_mile.empty()) cost_per_mile = {1.0};
    TpCosts costs = gen_tp_costs(read_locations(locations_file), cost_per_mile, RngSpec{seed});
    CsvTable matrix;
    matrix.name = "cost";
    matrix.header = {"Source"};
    for (const auto& c : costs.customers) matrix.header.push_back(c.name);
    for (size_t i = 0; i < costs.suppliers.size(); ++i) {
        std::vector<std::string> row = {costs.suppliers[i].name};
        for (double c : costs.cost[i]) row.push_back(fmt_num(c));
        matrix.rows.push_back(std::move(row));
    }
    std::vector<fs::path> files = {out_dir / "suppliers.csv", out_dir / "customers.csv",
                                   out_dir / "cost.csv"};
    write_file(files[0], write_csv(locations_to_csv("suppliers", costs.suppliers)));
    write_file(files[1], write_csv(locations_to_csv("customers", costs.customers)));
    write_file(files[2], write_csv(matrix));
    return emit_files(out, as_json, files);
}

int cmd_datagen_flp(std::ostream& out, bool as_json, const fs::path& out_dir, long n, long lo,
                    long hi, uint64_t seed) {
    auto costs = gen_flp_setup_costs(n, {lo, hi}, RngSpec{seed});
    CsvTable t;
    t.name = "setup_costs";
    t.header = {"Facility", "Setup Cost"};
    for (size_t i = 0; i < costs.size(); ++i)
        t.rows.push_back({"F" + std::to_string(i + 1), std::to_string(costs[i])});
    fs::path target = out_dir / "setup_costs.csv";
    write_file(target, write_csv(t));
    return emit_files(out, as_json, {target});
}

std::map<std::string, double> parse_consumption(const std::string& spec) {
    std::map<std::string, double> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw CliError("consumption override must look like 'Fare=2,OtherFare=1'");
        out[trim(item.substr(0, eq))] = std::stod(trim(item.substr(eq + 1)));
    }
    return out;
}

int cmd_sblp(std::ostream& out, bool as_json, const fs::path& out_dir, bool plan,
             const std::string& data_dir, long z, bool ratio, const std::string& consumption,
             bool no_solve) {
    std::map<std::string, CsvTable> tables;
    for (const char* stem : {"flights", "od_demand", "v1", "v2"}) {
        fs::path p = fs::path(data_dir) / (std::string(stem) + ".csv");
        if (!fs::exists(p)) throw CliError("missing dataset file: " + p.string());
        tables.emplace(stem, read_csv_file(p.string()));
    }
    GamInstance inst =
        load_gam_instance(tables.at("flights"), tables.at("od_demand"), tables.at("v1"),
                          tables.at("v2"), ratio ? ShadowMode::Ratio : ShadowMode::Absolute);
    if (!consumption.empty()) {
        for (const auto& [fare, a] : parse_consumption(consumption)) {
            bool hit = false;
            for (auto& opt : inst.options)
                if (opt.fare == fare) {
                    opt.A = a;
                    hit = true;
                }
            if (!hit) throw CliError("no options with fare '" + fare + "'");
        }
    }
    LinearModel model;
    std::vector<std::string> candidates;
    if (plan) {
        for (const auto& [key, cap] : inst.capacity) {
            (void)cap;
            candidates.push_back(key);
        }
        if (z < 0) z = (long)candidates.size();
        model = build_network_planning(inst, candidates, z);
    } else {
        std::vector<size_t> all(inst.options.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = i;
        model = build_sblp(inst, all);
    }
    fs::path lp_path = out_dir / (plan ? "plan.lp" : "sblp.lp");
    write_file(lp_path, write_lp(model));
    json j;
    j["lp_file"] = lp_path.string();
    j["variables"] = model.variables.size();
    j["constraints"] = model.constraints.size();
    if (plan) j["budget"] = z;
    std::vector<std::string> selected;
    if (!no_solve) {
        Solution sol = solve_milp(model);
        j["status"] = status_word(sol.status);
        j["objective"] = sol.objective;
        if (plan)
            for (const auto& [name, v] : sol.values)
                if (name.rfind("y_", 0) == 0 && v > 0.5) selected.push_back(name);
        if (plan) j["selected"] = selected;
    }
    if (as_json) {
        out << j.dump(2) << "\n";
    } else {
        out << "Model: " << lp_path.string() << " (" << model.variables.size()
            << " variables, " << model.constraints.size() << " constraints)\n";
        if (plan) out << "Flight budget: " << z << "\n";
        if (!no_solve) {
            out << "Status: " << j["status"].get<std::string>()
                << "  Objective: " << fmt_num(j["objective"].get<double>()) << "\n";
            if (plan) {
                out << "Selected flights (" << selected.size() << "):\n";
                for (const auto& s : selected) out << "  " << s << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Agentic LP/MILP formulation pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    bool as_json = false;
    app.add_option("--config", config_path, "key-value configuration file");
    app.add_option("--out", out_dir, "directory for generated files");
    app.add_flag("--json", as_json, "machine-readable output");
    app.fallthrough();

    std::string query_file, data_dir, transcript_id, lp_file, bench_dir;
    bool agnostic = false, allow_nonoptimal = false;
    int repetitions = 1;

    auto* classify_cmd = app.add_subcommand("classify", "detect the problem type of a query");
    classify_cmd->add_option("query", query_file, "query text file")->required();
    classify_cmd->add_option("--transcript-id", transcript_id,
                             "run id inside an id-keyed transcript file");

    auto* formulate_cmd =
        app.add_subcommand("formulate", "turn a query plus CSV data into a model");
    formulate_cmd->add_option("query", query_file, "query text file")->required();
    formulate_cmd->add_option("--data", data_dir, "directory of CSV datasets")->required();
    formulate_cmd->add_flag("--agnostic", agnostic, "skip classification; use the plan workflow");
    formulate_cmd->add_option("--transcript-id", transcript_id,
                              "run id inside an id-keyed transcript file");

    auto* solve_cmd = app.add_subcommand("solve", "solve an LP file");
    solve_cmd->add_option("lp", lp_file, "LP file")->required();
    solve_cmd->add_flag("--allow-nonoptimal", allow_nonoptimal,
                        "exit 0 even when not solved to optimality");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "run the benchmark harness");
    evaluate_cmd->add_option("benchmark", bench_dir, "benchmark directory")->required();
    evaluate_cmd->add_option("--repetitions", repetitions, "repeat count")
        ->check(CLI::PositiveNumber);

    std::string sales_file, locations_file;
    uint64_t seed = 42;
    std::vector<double> cost_per_mile;
    long flp_n = 0, flp_lo = 0, flp_hi = 0;
    auto* datagen_cmd = app.add_subcommand("datagen", "derive optimization data from raw CSVs");
    datagen_cmd->require_subcommand(1);
    datagen_cmd->fallthrough();
    auto* nrm_cmd = datagen_cmd->add_subcommand("nrm", "revenue management rows from sales");
    nrm_cmd->add_option("--sales", sales_file, "sales CSV")->required();
    nrm_cmd->add_option("--seed", seed, "generator seed");
    auto* tp_cmd = datagen_cmd->add_subcommand("tp", "transport cost matrix from locations");
    tp_cmd->add_option("--locations", locations_file, "locations CSV")->required();
    tp_cmd->add_option("--cost-per-mile", cost_per_mile, "unit cost choices");
    tp_cmd->add_option("--seed", seed, "generator seed");
    auto* flp_cmd = datagen_cmd->add_subcommand("flp", "facility setup costs");
    flp_cmd->add_option("--n", flp_n, "facility count")->required();
    flp_cmd->add_option("--min", flp_lo, "lowest cost")->required();
    flp_cmd->add_option("--max", flp_hi, "highest cost")->required();
    flp_cmd->add_option("--seed", seed, "generator seed");

    std::string sblp_data, consumption;
    long budget = -1;
    bool ratio = false, no_solve = false;
    auto* sblp_cmd = app.add_subcommand("sblp", "choice-based airline models");
    sblp_cmd->require_subcommand(1);
    sblp_cmd->fallthrough();
    sblp_cmd->add_option("--data", sblp_data, "directory with flights/od_demand/v1/v2 CSVs")
        ->required();
    sblp_cmd->add_flag("--ratio", ratio, "v2 holds shadow/attraction ratios");
    sblp_cmd->add_option("--consumption", consumption,
                         "per-fare capacity use, e.g. 'Eco-flexi=2,Eco-lite=1'");
    sblp_cmd->add_flag("--no-solve", no_solve, "write the LP without solving");
    auto* build_cmd = sblp_cmd->add_subcommand("build", "sales LP over all flights");
    auto* plan_cmd = sblp_cmd->add_subcommand("plan", "network planning with a flight budget");
    plan_cmd->add_option("--z", budget, "maximum number of flights kept");
    (void)build_cmd;

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        Config cfg = config_path.empty() ? Config{} : load_config(config_path);
        apply_env_overrides(cfg);
        fs::path out_path(out_dir);
        if (classify_cmd->parsed())
            return cmd_classify(out, cfg, as_json, out_path, query_file,
                                transcript_id.empty() ? "classify" : transcript_id);
        if (formulate_cmd->parsed())
            return cmd_formulate(out, cfg, as_json, out_path, query_file, data_dir, agnostic,
                                 transcript_id.empty() ? "formulate" : transcript_id);
        if (solve_cmd->parsed()) return cmd_solve(out, as_json, lp_file, allow_nonoptimal);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(out, cfg, as_json, out_path, bench_dir, repetitions);
        if (nrm_cmd->parsed())
            return cmd_datagen_nrm(out, as_json, out_path, sales_file, seed);
        if (tp_cmd->parsed())
            return cmd_datagen_tp(out, as_json, out_path, locations_file, cost_per_mile, seed);
        if (flp_cmd->parsed())
            return cmd_datagen_flp(out, as_json, out_path, flp_n, flp_lo, flp_hi, seed);
        if (sblp_cmd->parsed())
            return cmd_sblp(out, as_json, out_path, plan_cmd->parsed(), sblp_data, budget,
                            ratio, consumption, no_solve);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no command\n";
    return 2;
}

}  // namespace leanopt
