#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/csv.hpp"
#include "leanopt/gateway.hpp"
#include "leanopt/model.hpp"
#include "leanopt/problem_type.hpp"
#include "leanopt/refdata.hpp"

namespace leanopt {

struct AgentError : std::runtime_error {
    AgentError(const std::string& msg, std::vector<AgentTrace> t = {})
        : std::runtime_error(msg), traces(std::move(t)) {}
    std::vector<AgentTrace> traces;
};

// Versioned prompt templates loaded from text assets; ids are file stems.
struct PromptLibrary {
    std::map<std::string, std::string> assets;
    const std::string& get(const std::string& id) const;  // throws on unknown id
};
PromptLibrary load_prompts(const std::string& directory);

// Replaces every "{key}" for the given slots; each provided slot must occur
// in the template. Unrelated braces pass through untouched.
std::string fill_slots(const std::string& tmpl,
                       const std::map<std::string, std::string>& slots);

struct WorkflowPrompt {
    enum class Kind { Tailored, Agnostic };
    Kind kind = Kind::Agnostic;
    std::string text;
    std::string demo_id;  // tailored only
};

struct ClassifyResult {
    ProblemType type = ProblemType::Mixture;
    bool fallback = false;  // answer was outside the list or the loop failed
    AgentTrace trace;
};

// Reasoning loop with the FileQA retrieval tool; the final answer is
// normalized against the allowed type list. Unrecognized answers and loop
// failures fall back to Mixture with the fallback flag set.
ClassifyResult classify(ChatBackend& backend, const PromptLibrary& prompts,
                        const RefStore& store, const std::string& query);

// Most similar same-type reference entry by embedding cosine; ties break on id.
const RefEntry& select_demo(const RefStore& store, ProblemType type, const std::string& query);

// Few-shot retrieval-and-formulate transcript with the demo's query, data
// category, formatted data and label spliced in (each exactly once).
WorkflowPrompt build_tailored_workflow(const PromptLibrary& prompts, const RefEntry& demo);

// Per file: name, columns, first n_rows rows, and the total row count.
std::string csv_schema_snapshot(const std::vector<CsvTable>& datasets, size_t n_rows = 5);

// Plan-writing prompt around the seven-step skeleton with the query and
// dataset snapshot inserted.
WorkflowPrompt build_agnostic_workflow(const PromptLibrary& prompts, const std::string& query,
                                       const std::string& snapshot);

// Renders retrieved rows the way each type's model skeleton consumes them:
// line per product (RA, NRM, and the fallback for other types), supply and
// demand tables plus a cost matrix (TP, FLP), cost matrix only (AP).
std::string format_retrieved_data(ProblemType type, const std::vector<CsvTable>& tables);

// Compiles an Abstract Model Plan into structured model text: parameter lines
// name CSV columns which are read deterministically, then the objective and
// constraint lines are assembled with the extracted data.
std::string compile_plan(const std::string& plan, const std::vector<CsvTable>& datasets);

struct GenerateResult {
    LinearModel model;
    std::string answer_text;  // structured model text the model was parsed from
    std::vector<AgentTrace> traces;
};

// Tailored: reasoning loop with the CSVQA tool, final answer parsed as
// structured model text. Agnostic: one-shot plan, compiled deterministically.
// Up to two retries on unparseable output, then AgentError carrying traces.
GenerateResult generate_model(ChatBackend& backend, const PromptLibrary& prompts,
                              const std::string& query, const WorkflowPrompt& workflow,
                              const std::vector<CsvTable>& datasets);

struct PipelineResult {
    ProblemType type = ProblemType::Mixture;
    bool classify_fallback = false;
    WorkflowPrompt workflow;
    LinearModel model;
    std::string answer_text;
    std::vector<AgentTrace> traces;  // classification first, then generation
};

// classify -> workflow choice (Others/Mixture => agnostic, else tailored with
// the best same-type demo) -> generate_model.
PipelineResult route(ChatBackend& backend, const PromptLibrary& prompts, const RefStore& store,
                     const std::string& query, const std::vector<CsvTable>& datasets);

std::string pipeline_to_json(const PipelineResult& result);

}  // namespace leanopt
