#pragma once

#include <map>
#include <string>
#include <vector>

#include "leanopt/model.hpp"

namespace leanopt {

struct GrammarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric data bound to the symbolic model text. Sets are inclusive 1-based
// integer ranges; arrays are positional over their index set in declaration
// order.
struct RetrievedData {
    std::map<std::string, std::pair<long, long>> sets;
    std::map<std::string, double> scalars;
    std::map<std::string, std::vector<double>> arrays;
    std::map<std::string, std::vector<std::vector<double>>> matrices;

    bool has_param(const std::string& name) const {
        return scalars.count(name) || arrays.count(name) || matrices.count(name);
    }
    // Later declarations win so callers can layer overrides on top.
    void merge(const RetrievedData& other);
};

// Parses the "Retrieved Information:" payload lines:
//   set I = 1..10
//   A = [11197, 9097, 11197, 9995]
//   c = [[1, 2], [3, 4]]
//   Z = 5
RetrievedData parse_retrieved(const std::string& text);

// Parses the structured model text with sections "Objective Function:",
// "Constraints:" and "Retrieved Information:"; symbolic coefficients are
// bound to `extra` merged with the text's own retrieved section. The result
// validates.
LinearModel parse_model_grammar(const std::string& text, const RetrievedData& extra = {});

}  // namespace leanopt
