#include "leanopt/agents.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "leanopt/grammar.hpp"
#include "leanopt/lp_format.hpp"
#include "leanopt/retrieval.hpp"

namespace fs = std::filesystem;

namespace leanopt {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = (char)std::tolower((unsigned char)c);
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

std::string fmt_number(double v) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_cell(const std::string& cell, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(trim(cell), &pos);
        return pos == trim(cell).size() && !trim(cell).empty();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

const std::string& PromptLibrary::get(const std::string& id) const {
    auto it = assets.find(id);
    if (it == assets.end()) throw AgentError("unknown prompt asset '" + id + "'");
    return it->second;
}

PromptLibrary load_prompts(const std::string& directory) {
    PromptLibrary lib;
    if (!fs::is_directory(directory))
        throw AgentError("prompt directory not found: " + directory);
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        lib.assets[entry.path().stem().string()] = buf.str();
    }
    if (lib.assets.empty()) throw AgentError("no prompt assets in " + directory);
    return lib;
}

std::string fill_slots(const std::string& tmpl,
                       const std::map<std::string, std::string>& slots) {
    std::string out = tmpl;
    for (const auto& [key, value] : slots) {
        std::string token = "{" + key + "}";
        size_t pos = out.find(token);
        if (pos == std::string::npos)
            throw AgentError("template has no slot '" + key + "'");
        while (pos != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos = out.find(token, pos + value.size());
        }
    }
    return out;
}

ClassifyResult classify(ChatBackend& backend, const PromptLibrary& prompts,
                        const RefStore& store, const std::string& query) {
    VectorIndex index;
    for (const auto& e : store.entries) index.add({e.id, e.q, type_name(e.t)});
    Tool file_qa_tool{
        "FileQA",
        "Retrieves the reference problems most similar to the given text and their types.",
        [&index](const std::string& input) {
            auto hits = file_qa(index, input);
            std::string out = "The problem type of the content is " + hits[0].second + ".";
            out += "\nSimilar problems:";
            for (const auto& [text, type] : hits) {
                std::string snippet = text.substr(0, 80);
                std::replace(snippet.begin(), snippet.end(), '\n', ' ');
                out += "\n- [" + type + "] " + snippet;
            }
            return out;
        }};
    std::string question =
        "What is the problem type in the operation of the text? Please give the answer "
        "directly. Text: " +
        query;
    ClassifyResult result;
    try {
        ReactResult run = react_loop(backend, prompts.get("classify_v1"), {file_qa_tool},
                                     question);
        result.trace = std::move(run.trace);
        if (auto type = parse_type(run.answer)) {
            result.type = *type;
        } else {
            result.type = ProblemType::Mixture;
            result.fallback = true;
        }
    } catch (const ReactError& e) {
        result.trace = e.trace;
        result.type = ProblemType::Mixture;
        result.fallback = true;
    }
    return result;
}

const RefEntry& select_demo(const RefStore& store, ProblemType type, const std::string& query) {
    if (type == ProblemType::Others || type == ProblemType::Mixture)
        throw AgentError("no tailored demos exist for type " + std::string(type_name(type)));
    auto query_vec = embed(query);
    const RefEntry* best = nullptr;
    double best_score = -2.0;
    for (const auto& e : store.entries) {
        if (e.t != type) continue;
        double score = cosine(query_vec, embed(e.q));
        if (!best || score > best_score || (score == best_score && e.id < best->id)) {
            best = &e;
            best_score = score;
        }
    }
    if (!best)
        throw AgentError("reference store has no entry of type " +
                         std::string(type_name(type)));
    return *best;
}

WorkflowPrompt build_tailored_workflow(const PromptLibrary& prompts, const RefEntry& demo) {
    auto require = [&demo](const std::string& field, const std::string& value) {
        if (trim(value).empty())
            throw AgentError("demo '" + demo.id + "' is missing field " + field);
    };
    require("q", demo.q);
    require("g", demo.g);
    require("f", demo.f);
    require("m", demo.m);
    const std::string& tmpl = prompts.get("tailored_workflow_v1");
    for (const char* slot : {"{q_demo}", "{g_demo}", "{f_demo}", "{m_demo}"}) {
        size_t first = tmpl.find(slot);
        if (first == std::string::npos || tmpl.find(slot, first + 1) != std::string::npos)
            throw AgentError(std::string("workflow template must contain ") + slot +
                             " exactly once");
    }
    WorkflowPrompt wf;
    wf.kind = WorkflowPrompt::Kind::Tailored;
    wf.demo_id = demo.id;
    wf.text = fill_slots(tmpl, {{"q_demo", trim(demo.q)},
                                {"g_demo", trim(demo.g)},
                                {"f_demo", trim(demo.f)},
                                {"m_demo", trim(demo.m)}});
    return wf;
}

std::string csv_schema_snapshot(const std::vector<CsvTable>& datasets, size_t n_rows) {
    std::string out;
    for (const auto& table : datasets) {
        if (!out.empty()) out += "\n";
        out += "File: " + table.name + ".csv\n";
        out += "Columns: ";
        for (size_t j = 0; j < table.header.size(); ++j)
            out += (j ? ", " : "") + table.header[j];
        out += "\nRows: " + std::to_string(table.rows.size()) + "\n";
        for (size_t i = 0; i < std::min(n_rows, table.rows.size()); ++i) {
            for (size_t j = 0; j < table.rows[i].size(); ++j)
                out += (j ? "," : "") + table.rows[i][j];
            out += "\n";
        }
    }
    return out;
}

WorkflowPrompt build_agnostic_workflow(const PromptLibrary& prompts, const std::string& query,
                                       const std::string& snapshot) {
    WorkflowPrompt wf;
    wf.kind = WorkflowPrompt::Kind::Agnostic;
    wf.text = fill_slots(prompts.get("agnostic_workflow_v1"),
                         {{"query", query}, {"snapshot", snapshot}});
    return wf;
}

namespace {

std::string rows_as_lines(const CsvTable& table) {
    std::string out;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        out += std::to_string(i + 1) + ". ";
        for (size_t j = 0; j < table.header.size(); ++j) {
            if (j) out += ", ";
            out += table.header[j] + ": " + table.rows[i][j];
        }
        out += "\n";
    }
    return out;
}

std::string rows_as_table(const CsvTable& table) {
    std::string out;
    for (size_t j = 0; j < table.header.size(); ++j)
        out += (j ? " | " : "") + table.header[j];
    out += "\n";
    for (const auto& row : table.rows) {
        for (size_t j = 0; j < row.size(); ++j) out += (j ? " | " : "") + row[j];
        out += "\n";
    }
    return out;
}

std::string cost_matrix_block(const CsvTable& table) {
    // numeric columns only; a leading label column is common and skipped
    std::vector<size_t> numeric;
    for (size_t j = 0; j < table.header.size(); ++j) {
        bool ok = !table.rows.empty();
        for (const auto& row : table.rows) {
            double v;
            ok = ok && parse_cell(row[j], v);
        }
        if (ok) numeric.push_back(j);
    }
    if (numeric.empty())
        throw AgentError("cost table '" + table.name + "' has no numeric column");
    std::string out = "C = [\n";
    for (const auto& row : table.rows) {
        for (size_t k = 0; k < numeric.size(); ++k) out += (k ? " " : "") + row[numeric[k]];
        out += "\n";
    }
    out += "]\n";
    return out;
}

}  // namespace

std::string format_retrieved_data(ProblemType type, const std::vector<CsvTable>& tables) {
    if (tables.empty()) throw AgentError("no retrieved tables to format");
    switch (type) {
        case ProblemType::TP:
        case ProblemType::FLP: {
            if (tables.size() != 3)
                throw AgentError(std::string(type_name(type)) +
                                 " formatting expects supply/facility, demand and cost "
                                 "tables, got " +
                                 std::to_string(tables.size()));
            std::string first_title =
                type == ProblemType::TP ? "1. Supply Data\n" : "1. Facility Data\n";
            return first_title + rows_as_table(tables[0]) + "\n2. Demand Data\n" +
                   rows_as_table(tables[1]) + "\n3. Full Cost Matrix C\n" +
                   cost_matrix_block(tables[2]) +
                   "This is the complete cost matrix C with no simplification or "
                   "abbreviation.\n";
        }
        case ProblemType::AP: {
            if (tables.size() != 1)
                throw AgentError("AP formatting expects exactly the cost table, got " +
                                 std::to_string(tables.size()));
            return "Here is all the data from " + tables[0].name + ".csv as provided:\n" +
                   cost_matrix_block(tables[0]) +
                   "This is the complete cost matrix C with no simplification or "
                   "abbreviation.\n";
        }
        default: {
            // line-per-record layout: RA and NRM skeletons consume data this way,
            // and it is the least structured fallback for the remaining types
            std::string out;
            for (size_t t = 0; t < tables.size(); ++t) {
                out += "----------------DataFrame " + std::to_string(t + 1) + " - " +
                       tables[t].name + ".csv:----------------\n";
                out += rows_as_lines(tables[t]);
            }
            return out;
        }
    }
}

namespace {

const CsvTable* find_table(const std::vector<CsvTable>& datasets, const std::string& file) {
    std::string want = lower(trim(file));
    if (want.size() > 4 && want.substr(want.size() - 4) == ".csv")
        want = want.substr(0, want.size() - 4);
    for (const auto& t : datasets)
        if (lower(t.name) == want) return &t;
    return nullptr;
}

std::vector<double> read_column(const CsvTable& table, const std::string& column) {
    int j = table.column_index(column);
    if (j < 0)
        throw AgentError("table '" + table.name + "' has no column '" + column + "'");
    std::vector<double> out;
    for (const auto& row : table.rows) {
        double v;
        if (!parse_cell(row[(size_t)j], v))
            throw AgentError("non-numeric cell '" + row[(size_t)j] + "' in column '" +
                             column + "' of " + table.name);
        out.push_back(v);
    }
    return out;
}

std::vector<std::vector<double>> read_matrix(const CsvTable& table) {
    std::vector<size_t> numeric;
    for (size_t j = 0; j < table.header.size(); ++j) {
        bool ok = !table.rows.empty();
        for (const auto& row : table.rows) {
            double v;
            ok = ok && parse_cell(row[j], v);
        }
        if (ok) numeric.push_back(j);
    }
    if (numeric.empty()) throw AgentError("table '" + table.name + "' has no numeric column");
    std::vector<std::vector<double>> out;
    for (const auto& row : table.rows) {
        std::vector<double> r;
        for (size_t j : numeric) {
            double v;
            parse_cell(row[j], v);
            r.push_back(v);
        }
        out.push_back(std::move(r));
    }
    return out;
}

struct PlanVariable {
    std::string name;
    std::vector<std::string> indices;
    std::string type;  // CONTINUOUS / INTEGER / BINARY
};

std::string subscript(const PlanVariable& v) {
    if (v.indices.empty()) return v.name;
    if (v.indices.size() == 1) return v.name + "_" + v.indices[0];
    std::string out = v.name + "_{";
    for (size_t i = 0; i < v.indices.size(); ++i) out += (i ? "," : "") + v.indices[i];
    return out + "}";
}

std::string index_list(const PlanVariable& v) {
    std::string out;
    for (size_t i = 0; i < v.indices.size(); ++i) out += (i ? ", " : "") + v.indices[i];
    return out;
}

}  // namespace

std::string compile_plan(const std::string& plan, const std::vector<CsvTable>& datasets) {
    std::string body = plan;
    size_t start = plan.find("Abstract Model Plan Start");
    size_t end = plan.find("Abstract Model Plan End");
    if (start != std::string::npos && end != std::string::npos && end > start) {
        start = plan.find('\n', start);
        body = plan.substr(start + 1, plan.rfind('\n', end) - start - 1);
    }

    auto lines = split_lines(body);
    enum Section { None, Variables, Parameters, ObjectiveS, Constraints };
    Section section = None;
    std::vector<PlanVariable> variables;
    std::string objective;
    std::vector<std::pair<std::string, std::string>> constraints;  // name, expression
    std::string retrieved;

    static const std::regex var_re(
        R"(([A-Za-z]\w*)\[(\w+)(?:\s*,\s*(\w+))?\].*Type:\s*(CONTINUOUS|INTEGER|BINARY))");
    static const std::regex col_re(
        R"(^([A-Za-z]\w*)\s*=\s*column\s*'([^']+)'\s*of\s*([\w.\- ]+?)\s*$)");
    static const std::regex mat_re(R"(^([A-Za-z]\w*)\s*=\s*matrix\s*of\s*([\w.\- ]+?)\s*$)");
    static const std::regex num_re(R"(^([A-Za-z]\w*)\s*=\s*(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$)");
    static const std::regex set_dim_re(
        R"(^set\s+(\w+)\s*=\s*(rows|columns)\s*of\s*([\w.\- ]+?)\s*$)");
    static const std::regex set_range_re(R"(^set\s+(\w+)\s*=\s*(\d+)\.\.(\d+)\s*$)");

    for (const auto& raw : lines) {
        std::string line = trim(raw);
        std::string plain = line;
        // strip "3." / "-" / "*" bullets before header and payload matching
        plain = std::regex_replace(plain, std::regex(R"(^(\d+[.)]\s*|[-*]\s*))"), "");
        if (plain.rfind("Define Decision Variables", 0) == 0) {
            section = Variables;
            continue;
        }
        if (plain.rfind("Identify Parameters", 0) == 0) {
            section = Parameters;
            continue;
        }
        if (plain.rfind("Formulate Objective", 0) == 0) {
            section = ObjectiveS;
            size_t colon = plain.find(':');
            if (colon != std::string::npos) objective += trim(plain.substr(colon + 1));
            continue;
        }
        if (plain.rfind("Formulate Constraints", 0) == 0) {
            section = Constraints;
            continue;
        }
        if (plain.rfind("Analyze Query", 0) == 0 || plain.rfind("Identify Model Type", 0) == 0 ||
            plain.rfind("Define Index Sets", 0) == 0) {
            section = None;
            continue;
        }
        if (plain.empty()) continue;

        switch (section) {
            case Variables: {
                std::smatch m;
                if (std::regex_search(plain, m, var_re)) {
                    PlanVariable v;
                    v.name = m[1];
                    v.indices.push_back(m[2]);
                    if (m[3].matched) v.indices.push_back(m[3]);
                    v.type = m[4];
                    variables.push_back(std::move(v));
                }
                break;
            }
            case Parameters: {
                std::smatch m;
                if (std::regex_match(plain, m, col_re)) {
                    const CsvTable* t = find_table(datasets, m[3]);
                    if (!t) throw AgentError("plan references unknown dataset '" +
                                             std::string(m[3]) + "'");
                    auto values = read_column(*t, m[2]);
                    retrieved += std::string(m[1]) + " = [";
                    for (size_t i = 0; i < values.size(); ++i)
                        retrieved += (i ? ", " : "") + fmt_number(values[i]);
                    retrieved += "]\n";
                } else if (std::regex_match(plain, m, mat_re)) {
                    const CsvTable* t = find_table(datasets, m[2]);
                    if (!t) throw AgentError("plan references unknown dataset '" +
                                             std::string(m[2]) + "'");
                    auto matrix = read_matrix(*t);
                    retrieved += std::string(m[1]) + " = [";
                    for (size_t i = 0; i < matrix.size(); ++i) {
                        retrieved += i ? ", [" : "[";
                        for (size_t j = 0; j < matrix[i].size(); ++j)
                            retrieved += (j ? ", " : "") + fmt_number(matrix[i][j]);
                        retrieved += "]";
                    }
                    retrieved += "]\n";
                } else if (std::regex_match(plain, m, num_re)) {
                    retrieved += std::string(m[1]) + " = " + std::string(m[2]) + "\n";
                } else if (std::regex_match(plain, m, set_dim_re)) {
                    const CsvTable* t = find_table(datasets, m[3]);
                    if (!t) throw AgentError("plan references unknown dataset '" +
                                             std::string(m[3]) + "'");
                    size_t n = m[2] == "rows" ? t->rows.size() : read_matrix(*t)[0].size();
                    retrieved += "set " + std::string(m[1]) + " = 1.." + std::to_string(n) +
                                 "\n";
                } else if (std::regex_match(plain, m, set_range_re)) {
                    retrieved += "set " + std::string(m[1]) + " = " + std::string(m[2]) +
                                 ".." + std::string(m[3]) + "\n";
                } else {
                    throw AgentError("unrecognized parameter line: " + plain);
                }
                break;
            }
            case ObjectiveS:
                objective += (objective.empty() ? "" : " ") + plain;
                break;
            case Constraints: {
                size_t colon = plain.find(':');
                std::string head = colon == std::string::npos ? "" : plain.substr(0, colon);
                if (colon != std::string::npos &&
                    head.find_first_of("=<>+*[]{}") == std::string::npos)
                    constraints.push_back({trim(head), trim(plain.substr(colon + 1))});
                else
                    constraints.push_back({"", plain});
                break;
            }
            case None:
                break;
        }
    }

    if (trim(objective).empty()) throw AgentError("plan has no objective expression");
    if (constraints.empty()) throw AgentError("plan has no constraints");

    // integrality from the declared variable types
    for (const auto& v : variables) {
        if (v.type == "INTEGER")
            constraints.push_back({"Integrality of " + v.name,
                                   subscript(v) + " in Z+, forall " + index_list(v)});
        else if (v.type == "BINARY")
            constraints.push_back({"Binary domain of " + v.name,
                                   subscript(v) + " in {0,1}, forall " + index_list(v)});
    }

    std::string out = "Objective Function:\n" + trim(objective) + "\n\nConstraints:\n";
    for (size_t i = 0; i < constraints.size(); ++i) {
        std::string name = constraints[i].first.empty()
                               ? "Constraint " + std::to_string(i + 1)
                               : constraints[i].first;
        out += std::to_string(i + 1) + ". " + name + ":\n" + constraints[i].second + "\n";
    }
    out += "\nRetrieved Information:\n" + retrieved;
    return out;
}

GenerateResult generate_model(ChatBackend& backend, const PromptLibrary& prompts,
                              const std::string& query, const WorkflowPrompt& workflow,
                              const std::vector<CsvTable>& datasets) {
    GenerateResult result;
    std::string failure;
    const int max_attempts = 3;  // first try plus two retries

    if (workflow.kind == WorkflowPrompt::Kind::Tailored) {
        std::string system =
            fill_slots(prompts.get("model_generation_v1"), {{"workflow", workflow.text}});
        Tool csv_qa_tool{"CSVQA",
                         "Fuzzy row retrieval over the problem's CSV datasets.",
                         [&datasets](const std::string& input) {
                             return csv_qa(datasets, input);
                         }};
        std::string question =
            "What is the mathematical model based on the user's query?\nContent: " + query;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            std::string ask = question;
            if (!failure.empty())
                ask += "\nYour previous answer could not be parsed: " + failure +
                       "\nAnswer again with the complete model in the required format.";
            ReactResult run;
            try {
                run = react_loop(backend, system, {csv_qa_tool}, ask);
            } catch (const ReactError& e) {
                auto traces = result.traces;
                traces.push_back(e.trace);
                throw AgentError(std::string("model generation loop failed: ") + e.what(),
                                 std::move(traces));
            }
            result.traces.push_back(run.trace);
            try {
                result.model = parse_model_grammar(run.answer);
                result.answer_text = run.answer;
                return result;
            } catch (const GrammarError& e) {
                failure = e.what();
            }
        }
    } else {
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            std::string prompt = workflow.text;
            if (!failure.empty())
                prompt += "\nYour previous plan could not be compiled: " + failure +
                          "\nWrite the plan again following the required line formats.";
            ChatRequest request;
            request.messages.push_back({Role::User, prompt});
            std::string plan = backend.complete(request);
            AgentTrace trace;
            trace.events.push_back({EventKind::Prompt, prompt, ""});
            trace.events.push_back({EventKind::FinalAnswer, plan, ""});
            result.traces.push_back(std::move(trace));
            try {
                result.answer_text = compile_plan(plan, datasets);
                result.model = parse_model_grammar(result.answer_text);
                return result;
            } catch (const AgentError& e) {
                failure = e.what();
            } catch (const GrammarError& e) {
                failure = e.what();
            }
        }
    }
    throw AgentError("model output unusable after " + std::to_string(max_attempts) +
                         " attempts: " + failure,
                     result.traces);
}

PipelineResult route(ChatBackend& backend, const PromptLibrary& prompts, const RefStore& store,
                     const std::string& query, const std::vector<CsvTable>& datasets) {
    PipelineResult result;
    ClassifyResult cls = classify(backend, prompts, store, query);
    result.type = cls.type;
    result.classify_fallback = cls.fallback;
    result.traces.push_back(std::move(cls.trace));

    if (result.type == ProblemType::Others || result.type == ProblemType::Mixture) {
        result.workflow =
            build_agnostic_workflow(prompts, query, csv_schema_snapshot(datasets));
    } else {
        const RefEntry& demo = select_demo(store, result.type, query);
        result.workflow = build_tailored_workflow(prompts, demo);
    }

    GenerateResult gen = generate_model(backend, prompts, query, result.workflow, datasets);
    result.model = std::move(gen.model);
    result.answer_text = std::move(gen.answer_text);
    for (auto& t : gen.traces) result.traces.push_back(std::move(t));
    return result;
}

std::string pipeline_to_json(const PipelineResult& result) {
    auto kind_name = [](EventKind k) {
        switch (k) {
            case EventKind::Prompt: return "prompt";
            case EventKind::Thought: return "thought";
            case EventKind::Action: return "action";
            case EventKind::Observation: return "observation";
            case EventKind::FinalAnswer: return "final_answer";
        }
        return "unknown";
    };
    nlohmann::json j;
    j["type"] = type_name(result.type);
    j["classify_fallback"] = result.classify_fallback;
    j["workflow"]["kind"] =
        result.workflow.kind == WorkflowPrompt::Kind::Tailored ? "tailored" : "agnostic";
    if (!result.workflow.demo_id.empty()) j["workflow"]["demo_id"] = result.workflow.demo_id;
    j["answer"] = result.answer_text;
    j["model_lp"] = write_lp(result.model);
    j["traces"] = nlohmann::json::array();
    for (const auto& trace : result.traces) {
        nlohmann::json events = nlohmann::json::array();
        for (const auto& e : trace.events) {
            nlohmann::json ev;
            ev["kind"] = kind_name(e.kind);
            ev["text"] = e.text;
            if (!e.tool.empty()) ev["tool"] = e.tool;
            events.push_back(std::move(ev));
        }
        j["traces"].push_back(std::move(events));
    }
    return j.dump(2);
}

}  // namespace leanopt
