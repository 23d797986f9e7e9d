#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/agents.hpp"
#include "leanopt/refdata.hpp"

namespace leanopt {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EmVerdict { Match, Mismatch, NotProven };

// Outcome of one pipeline execution on one benchmark instance.
struct RunResult {
    std::string id;
    ProblemType type = ProblemType::Others;
    bool generated = false;          // a model came out of the pipeline
    std::optional<double> solved;    // optimal value of the generated model
    double label_value = 0.0;
    long input_tokens = 0;           // query size proxy
    size_t variable_count = 0;       // generated model size
    EmVerdict em = EmVerdict::Mismatch;
    std::string failure;             // diagnostic for generation/solve failures
    double wall_seconds = 0.0;
    std::string answer_text;
};

// |v - label| <= max(1e-6, 1e-4 * |label|): the solver-gap-aligned convention
// for "matches the ground truth optimal value".
bool value_match(double v, double label);

// Fraction of results whose solved value matches the label; failures and
// unsolved results count as mismatches.
double modeling_accuracy(const std::vector<RunResult>& results);

struct EmAccuracy {
    double match = 0.0;       // fraction proven equivalent
    double not_proven = 0.0;  // fraction where the comparison hit its cap
};
EmAccuracy em_accuracy(const std::vector<RunResult>& results);

// sum(opt - rev) / sum(opt); rev must already be 0 for failed formulations.
double wmape(const std::vector<double>& opt, const std::vector<double>& rev);

struct Bucket {
    long lo = 0;
    long hi = -1;  // -1 = unbounded
    int total = 0;
    int value_matched = 0;
    int em_matched = 0;
};

struct TypeStats {
    int total = 0;
    int value_matched = 0;
    int em_matched = 0;
    int em_not_proven = 0;
};

struct Report {
    int repetitions = 1;
    std::vector<RunResult> results;  // every run, repetitions x instances
    double accuracy = 0.0;           // repetition-averaged modeling accuracy
    double em_match = 0.0;
    double em_not_proven = 0.0;
    double wmape_value = 0.0;
    std::map<std::string, TypeStats> by_type;
    std::vector<Bucket> token_buckets;     // input-size axis
    std::vector<Bucket> variable_buckets;  // output-size axis

    std::string to_json() const;
    std::string to_text() const;  // accuracy table plus bucket breakdowns
};

using Pipeline = std::function<PipelineResult(const BenchmarkInstance&)>;

// Default axes: input tokens [0,200) [200,400) [400,800) [800,inf);
// generated variables [0,20) [20,100) [100,inf) (small/medium/large models).
extern const std::vector<long> kDefaultTokenEdges;
extern const std::vector<long> kDefaultVariableEdges;

// Runs every instance `repetitions` times through the pipeline, solving and
// comparing each generated model against the instance label. Per-instance
// failures are recorded as mismatch rows; the run itself never aborts.
Report run_benchmark(const Pipeline& pipeline, const std::vector<BenchmarkInstance>& instances,
                     int repetitions = 1,
                     const std::vector<long>& token_edges = kDefaultTokenEdges,
                     const std::vector<long>& variable_edges = kDefaultVariableEdges);

}  // namespace leanopt
