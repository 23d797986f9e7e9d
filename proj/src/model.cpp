#include "leanopt/model.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace leanopt {

void LinearExpr::normalize() {
    std::unordered_map<std::string, double> acc;
    std::vector<std::string> order;
    for (const auto& t : terms) {
        auto [it, inserted] = acc.try_emplace(t.var, 0.0);
        if (inserted) order.push_back(t.var);
        it->second += t.coeff;
    }
    terms.clear();
    for (const auto& v : order) {
        double c = acc[v];
        if (c != 0.0) terms.push_back({c, v});
    }
}

const Variable* LinearModel::find_variable(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

int LinearModel::variable_index(const std::string& name) const {
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

void check_expr(const LinearExpr& expr, const std::string& where,
                const std::unordered_set<std::string>& declared, std::vector<Defect>& out) {
    std::unordered_set<std::string> seen;
    for (const auto& t : expr.terms) {
        if (!std::isfinite(t.coeff))
            out.push_back({where, "non-finite coefficient on variable '" + t.var + "'"});
        if (!declared.count(t.var))
            out.push_back({where, "undeclared variable '" + t.var + "'"});
        if (!seen.insert(t.var).second)
            out.push_back({where, "duplicate term for variable '" + t.var + "'"});
    }
    if (!std::isfinite(expr.constant))
        out.push_back({where, "non-finite constant"});
}

}  // namespace

std::vector<Defect> validate(const LinearModel& model) {
    std::vector<Defect> out;
    std::unordered_set<std::string> declared;
    for (const auto& v : model.variables) {
        if (v.name.empty()) out.push_back({"model", "variable with empty name"});
        if (!declared.insert(v.name).second)
            out.push_back({v.name, "duplicate variable name"});
        if (std::isnan(v.lower) || std::isnan(v.upper))
            out.push_back({v.name, "NaN bound"});
        else if (v.lower > v.upper)
            out.push_back({v.name, "lower bound exceeds upper bound"});
        if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
            out.push_back({v.name, "binary variable with bounds outside [0,1]"});
    }
    check_expr(model.objective, "objective", declared, out);
    std::unordered_set<std::string> cnames;
    for (const auto& c : model.constraints) {
        std::string where = c.name.empty() ? "<unnamed constraint>" : c.name;
        if (!c.name.empty() && !cnames.insert(c.name).second)
            out.push_back({c.name, "duplicate constraint name"});
        if (c.expr.terms.empty())
            out.push_back({where, "empty constraint expression"});
        if (!std::isfinite(c.rhs))
            out.push_back({where, "non-finite right-hand side"});
        check_expr(c.expr, where, declared, out);
    }
    return out;
}

}  // namespace leanopt
