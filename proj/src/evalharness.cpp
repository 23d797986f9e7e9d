#include "leanopt/evalharness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "leanopt/canonical.hpp"
#include "leanopt/solver.hpp"

namespace leanopt {

const std::vector<long> kDefaultTokenEdges = {0, 200, 400, 800};
const std::vector<long> kDefaultVariableEdges = {0, 20, 100};

bool value_match(double v, double label) {
    return std::fabs(v - label) <= std::max(1e-6, 1e-4 * std::fabs(label));
}

double modeling_accuracy(const std::vector<RunResult>& results) {
    if (results.empty()) return 0.0;
    int matched = 0;
    for (const auto& r : results)
        if (r.solved && value_match(*r.solved, r.label_value)) ++matched;
    return (double)matched / (double)results.size();
}

EmAccuracy em_accuracy(const std::vector<RunResult>& results) {
    EmAccuracy out;
    if (results.empty()) return out;
    int match = 0, open = 0;
    for (const auto& r : results) {
        match += r.em == EmVerdict::Match;
        open += r.em == EmVerdict::NotProven;
    }
    out.match = (double)match / (double)results.size();
    out.not_proven = (double)open / (double)results.size();
    return out;
}

double wmape(const std::vector<double>& opt, const std::vector<double>& rev) {
    if (opt.size() != rev.size()) throw EvalError("wmape: length mismatch");
    double total = 0.0, gap = 0.0;
    for (size_t i = 0; i < opt.size(); ++i) {
        total += opt[i];
        gap += opt[i] - rev[i];
    }
    if (total <= 0.0) throw EvalError("wmape: total optimal value is not positive");
    return gap / total;
}

namespace {

std::vector<Bucket> make_buckets(const std::vector<long>& edges) {
    std::vector<Bucket> out;
    for (size_t i = 0; i < edges.size(); ++i) {
        Bucket b;
        b.lo = edges[i];
        b.hi = i + 1 < edges.size() ? edges[i + 1] : -1;
        out.push_back(b);
    }
    return out;
}

void tally(std::vector<Bucket>& buckets, long size, bool value_ok, bool em_ok) {
    for (auto& b : buckets) {
        if (size < b.lo || (b.hi >= 0 && size >= b.hi)) continue;
        b.total++;
        b.value_matched += value_ok;
        b.em_matched += em_ok;
        return;
    }
}

std::string bucket_label(const Bucket& b) {
    if (b.hi < 0) return "[" + std::to_string(b.lo) + ",inf)";
    return "[" + std::to_string(b.lo) + "," + std::to_string(b.hi) + ")";
}

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

Report run_benchmark(const Pipeline& pipeline, const std::vector<BenchmarkInstance>& instances,
                     int repetitions, const std::vector<long>& token_edges,
                     const std::vector<long>& variable_edges) {
    if (repetitions < 1) throw EvalError("repetitions must be at least 1");
    Report report;
    report.repetitions = repetitions;
    report.token_buckets = make_buckets(token_edges);
    report.variable_buckets = make_buckets(variable_edges);

    std::vector<double> opt, rev;
    for (int rep = 0; rep < repetitions; ++rep) {
        for (const auto& inst : instances) {
            RunResult r;
            r.id = inst.id;
            r.type = inst.declared_type;
            r.label_value = inst.label_optimal;
            r.input_tokens = inst.approx_tokens;
            auto started = std::chrono::steady_clock::now();
            LinearModel model;
            try {
                PipelineResult run = pipeline(inst);
                model = std::move(run.model);
                r.generated = true;
                r.answer_text = std::move(run.answer_text);
                r.variable_count = model.variables.size();
            } catch (const std::exception& e) {
                r.failure = e.what();
            }
            if (r.generated) {
                try {
                    Solution sol = solve_milp(model);
                    if (sol.status == SolveStatus::Optimal)
                        r.solved = sol.objective;
                    else
                        r.failure = "generated model did not solve to optimality";
                } catch (const std::exception& e) {
                    r.failure = e.what();
                }
                try {
                    r.em = models_equivalent(model, inst.label_model()).equivalent
                               ? EmVerdict::Match
                               : EmVerdict::Mismatch;
                } catch (const AmbiguityError&) {
                    r.em = EmVerdict::NotProven;
                } catch (const std::exception& e) {
                    r.em = EmVerdict::Mismatch;
                    if (r.failure.empty()) r.failure = e.what();
                }
            }
            r.wall_seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();

            bool value_ok = r.solved && value_match(*r.solved, r.label_value);
            if (r.em == EmVerdict::Match && !value_ok)
                throw EvalError("equivalence/value invariant violated on '" + r.id +
                                "': formulations match but optimal values disagree");

            opt.push_back(r.label_value);
            rev.push_back(r.solved ? *r.solved : 0.0);  // failures earn nothing

            auto& stats = report.by_type[type_name(r.type)];
            stats.total++;
            stats.value_matched += value_ok;
            stats.em_matched += r.em == EmVerdict::Match;
            stats.em_not_proven += r.em == EmVerdict::NotProven;
            tally(report.token_buckets, r.input_tokens, value_ok, r.em == EmVerdict::Match);
            tally(report.variable_buckets, (long)r.variable_count, value_ok,
                  r.em == EmVerdict::Match);
            report.results.push_back(std::move(r));
        }
    }
    report.accuracy = modeling_accuracy(report.results);
    EmAccuracy em = em_accuracy(report.results);
    report.em_match = em.match;
    report.em_not_proven = em.not_proven;
    report.wmape_value = opt.empty() ? 0.0 : wmape(opt, rev);
    return report;
}

std::string Report::to_json() const {
    auto verdict = [](EmVerdict v) {
        switch (v) {
            case EmVerdict::Match: return "match";
            case EmVerdict::Mismatch: return "mismatch";
            case EmVerdict::NotProven: return "not_proven";
        }
        return "mismatch";
    };
    nlohmann::json j;
    j["repetitions"] = repetitions;
    j["accuracy"] = accuracy;
    j["em_match"] = em_match;
    j["em_not_proven"] = em_not_proven;
    j["wmape"] = wmape_value;
    for (const auto& [type, s] : by_type)
        j["by_type"][type] = {{"total", s.total},
                              {"value_matched", s.value_matched},
                              {"em_matched", s.em_matched},
                              {"em_not_proven", s.em_not_proven}};
    auto bucket_json = [](const std::vector<Bucket>& buckets) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& b : buckets)
            arr.push_back({{"range", bucket_label(b)},
                           {"total", b.total},
                           {"value_matched", b.value_matched},
                           {"em_matched", b.em_matched}});
        return arr;
    };
    j["token_buckets"] = bucket_json(token_buckets);
    j["variable_buckets"] = bucket_json(variable_buckets);
    j["results"] = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json row;
        row["id"] = r.id;
        row["type"] = type_name(r.type);
        row["generated"] = r.generated;
        if (r.solved) row["solved"] = *r.solved;
        row["label"] = r.label_value;
        row["em"] = verdict(r.em);
        row["input_tokens"] = r.input_tokens;
        row["variables"] = r.variable_count;
        if (!r.failure.empty()) row["failure"] = r.failure;
        j["results"].push_back(std::move(row));
    }
    return j.dump(2);
}

std::string Report::to_text() const {
    std::string out;
    out += "Benchmark report (" + std::to_string(repetitions) + " repetition" +
           (repetitions == 1 ? "" : "s") + ", " + std::to_string(results.size()) +
           " runs)\n\n";
    out += "Type                             Total  Value  EM     NotProven\n";
    for (const auto& [type, s] : by_type) {
        char line[128];
        snprintf(line, sizeof line, "%-32s %-6d %-6s %-6s %d\n", type.c_str(), s.total,
                 fmt(s.total ? (double)s.value_matched / s.total : 0.0).c_str(),
                 fmt(s.total ? (double)s.em_matched / s.total : 0.0).c_str(),
                 s.em_not_proven);
        out += line;
    }
    char overall[160];
    snprintf(overall, sizeof overall,
             "%-32s %-6zu %-6s %-6s %s\nWMAPE: %s\n", "Overall", results.size(),
             fmt(accuracy).c_str(), fmt(em_match).c_str(), fmt(em_not_proven).c_str(),
             fmt(wmape_value).c_str());
    out += overall;
    auto bucket_block = [&](const char* title, const std::vector<Bucket>& buckets) {
        std::string s = std::string("\n") + title + "\n";
        for (const auto& b : buckets) {
            char line[128];
            snprintf(line, sizeof line, "%-12s %-6d %-6s %s\n", bucket_label(b).c_str(),
                     b.total, fmt(b.total ? (double)b.value_matched / b.total : 0.0).c_str(),
                     fmt(b.total ? (double)b.em_matched / b.total : 0.0).c_str());
            s += line;
        }
        return s;
    };
    out += bucket_block("Input tokens   Total  Value  EM", token_buckets);
    out += bucket_block("Variables      Total  Value  EM", variable_buckets);
    return out;
}

}  // namespace leanopt
