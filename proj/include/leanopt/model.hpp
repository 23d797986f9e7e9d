#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace leanopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Integer, Binary };
enum class Sense { Le, Ge, Eq };
enum class Objective { Maximize, Minimize };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    VarKind kind = VarKind::Continuous;
};

struct Term {
    double coeff = 0.0;
    std::string var;
};

struct LinearExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    LinearExpr& add(double coeff, const std::string& var) {
        terms.push_back({coeff, var});
        return *this;
    }
    // Merges duplicate variables and drops zero coefficients.
    void normalize();
};

struct Constraint {
    std::string name;
    LinearExpr expr;
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

struct LinearModel {
    Objective sense = Objective::Maximize;
    LinearExpr objective;
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    std::map<std::string, std::string> metadata;

    const Variable* find_variable(const std::string& name) const;
    int variable_index(const std::string& name) const;  // -1 when absent
};

struct Defect {
    std::string where;    // variable or constraint name, or "model"
    std::string message;
};

// Empty result iff the model satisfies every type invariant.
std::vector<Defect> validate(const LinearModel& model);

inline void require_valid(const LinearModel& model) {
    auto defects = validate(model);
    if (!defects.empty())
        throw std::invalid_argument("invalid model: " + defects.front().where + ": " +
                                    defects.front().message);
}

}  // namespace leanopt
