#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/model.hpp"
#include "leanopt/problem_type.hpp"

namespace leanopt {

struct RefError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One reference instance: query, type, data-category hint, formatted relevant
// data, and the label model in the structured output grammar.
struct RefEntry {
    std::string id;
    std::string q;
    ProblemType t = ProblemType::Others;
    std::string g;
    std::string f;
    std::string m;
};

struct RefStore {
    std::vector<RefEntry> entries;
    std::map<ProblemType, int> type_counts;
    const RefEntry* find(const std::string& id) const;  // nullptr when absent
};

// Directory layout: manifest.json listing {id, type, category, dir}; each
// entry directory holds query.txt, formatted.txt, label.txt and any CSVs.
RefStore load_refdata(const std::string& directory);

struct BenchmarkInstance {
    std::string id;
    std::string query;
    std::vector<std::string> dataset_paths;  // resolved absolute/relative paths
    std::string label_text;
    bool label_is_lp = false;  // label.lp instead of label.txt (output grammar)
    double label_optimal = 0.0;
    ProblemType declared_type = ProblemType::Others;
    long approx_tokens = 0;  // query size proxy
    LinearModel label_model() const;
};

// manifest.json lists {id, type, dir, optimal, datasets}; each instance
// directory holds query.txt, label.txt or label.lp, and the dataset CSVs.
std::vector<BenchmarkInstance> load_benchmark(const std::string& directory);

struct ValidationReport {
    bool value_ok = false;
    double solved_value = 0.0;
    bool uniqueness_suspect = false;
    std::string message;
};

// Solves the label and checks the stored optimal within
// max(1e-6, 1e-4 * |label|); probes for multiple optima by re-solving under
// randomized objective perturbations.
ValidationReport validate_instance(const BenchmarkInstance& instance);

// Size proxy used for input-size buckets: character count / 4.
long approx_tokens(const std::string& text);

}  // namespace leanopt
