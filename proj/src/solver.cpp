#include "leanopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace leanopt {

namespace {

struct Column {
    int orig_var;      // original variable index
    double scale;      // +1 for shifted, -1 for upper-mirrored / negative split
    double offset;     // x_orig contribution = offset + scale * x_col (per column pair rules)
};

enum class ColRole { Structural, Slack, Surplus, Artificial };

struct Standard {
    // max s * (c_orig . x) ; rows A x (sense) b
    std::vector<double> c;               // internal objective over columns
    std::vector<std::vector<double>> A;  // dense rows over structural columns
    std::vector<double> b;
    std::vector<Sense> sense;
    std::vector<Column> cols;
    double c0 = 0.0;   // constant part of the original objective
    double s = 1.0;    // +1 maximize, -1 minimize
    size_t n_orig = 0;
};

Standard to_standard(const LinearModel& model) {
    Standard st;
    st.s = model.sense == Objective::Maximize ? 1.0 : -1.0;
    st.n_orig = model.variables.size();
    st.c0 = model.objective.constant;

    std::vector<double> c_orig(model.variables.size(), 0.0);
    for (const auto& t : model.objective.terms)
        c_orig[model.variable_index(t.var)] += t.coeff;

    // column layout per original variable; extra rows for finite uppers
    std::vector<std::vector<std::pair<int, double>>> var_cols(model.variables.size());
    std::vector<std::pair<int, double>> upper_rows;  // (col, bound)
    for (size_t k = 0; k < model.variables.size(); ++k) {
        const auto& v = model.variables[k];
        bool lb = std::isfinite(v.lower), ub = std::isfinite(v.upper);
        if (lb) {
            int col = (int)st.cols.size();
            st.cols.push_back({(int)k, 1.0, v.lower});
            var_cols[k] = {{col, 1.0}};
            st.c0 += c_orig[k] * v.lower;
            if (ub) upper_rows.push_back({col, v.upper - v.lower});
        } else if (ub) {
            int col = (int)st.cols.size();
            st.cols.push_back({(int)k, -1.0, v.upper});
            var_cols[k] = {{col, -1.0}};
            st.c0 += c_orig[k] * v.upper;
        } else {
            int cp = (int)st.cols.size();
            st.cols.push_back({(int)k, 1.0, 0.0});
            int cn = (int)st.cols.size();
            st.cols.push_back({(int)k, -1.0, 0.0});
            var_cols[k] = {{cp, 1.0}, {cn, -1.0}};
        }
    }
    size_t n = st.cols.size();
    st.c.assign(n, 0.0);
    for (size_t k = 0; k < model.variables.size(); ++k)
        for (auto& [col, sc] : var_cols[k]) st.c[col] += st.s * c_orig[k] * sc;

    auto add_row = [&](const LinearExpr& expr, Sense sense, double rhs) {
        std::vector<double> row(n, 0.0);
        for (const auto& t : expr.terms) {
            int k = model.variable_index(t.var);
            for (auto& [col, sc] : var_cols[k]) row[col] += t.coeff * sc;
        }
        // constant contribution from the bound shifts
        double off = expr.constant;
        for (const auto& t : expr.terms) {
            int k = model.variable_index(t.var);
            const auto& v = model.variables[k];
            if (std::isfinite(v.lower)) off += t.coeff * v.lower;
            else if (std::isfinite(v.upper)) off += t.coeff * v.upper;
        }
        st.A.push_back(std::move(row));
        st.b.push_back(rhs - off);
        st.sense.push_back(sense);
    };
    for (const auto& cons : model.constraints) {
        LinearExpr e = cons.expr;
        e.normalize();
        add_row(e, cons.sense, cons.rhs);
    }
    for (auto& [col, bound] : upper_rows) {
        std::vector<double> row(n, 0.0);
        row[col] = 1.0;
        st.A.push_back(std::move(row));
        st.b.push_back(bound);
        st.sense.push_back(Sense::Le);
    }
    return st;
}

struct Tableau {
    size_t m, n_total;
    std::vector<std::vector<double>> T;  // m rows, n_total + 1 (rhs)
    std::vector<double> obj;             // n_total + 1, holds z_j - c_j and value
    std::vector<int> basis;
    std::vector<ColRole> role;
    const SolverOptions& opts;

    explicit Tableau(const SolverOptions& o) : opts(o) {}

    void pivot(size_t pr, size_t pc) {
        double piv = T[pr][pc];
        if (std::fabs(piv) < opts.pivot_tol)
            throw NumericalError("pivot magnitude below tolerance");
        for (auto& x : T[pr]) x /= piv;
        for (size_t i = 0; i < m; ++i) {
            if (i == pr) continue;
            double f = T[i][pc];
            if (f == 0.0) continue;
            for (size_t j = 0; j <= n_total; ++j) T[i][j] -= f * T[pr][j];
        }
        double f = obj[pc];
        if (f != 0.0)
            for (size_t j = 0; j <= n_total; ++j) obj[j] -= f * T[pr][j];
        basis[pr] = (int)pc;
    }

    // Returns true at optimality, false if unbounded. Prices with Dantzig's
    // rule for speed and falls back to Bland's rule (anti-cycling) after a
    // run of pivots without objective progress.
    bool iterate(bool forbid_artificial) {
        const double rc_tol = 1e-9;
        const long stall_limit = 100;
        long stall = 0;
        double last_obj = obj[n_total];
        for (;;) {
            bool bland = stall > stall_limit;
            size_t pc = n_total;
            double most_neg = -rc_tol;
            for (size_t j = 0; j < n_total; ++j) {
                if (forbid_artificial && role[j] == ColRole::Artificial) continue;
                if (obj[j] < most_neg) {
                    pc = j;
                    if (bland) break;  // lowest eligible index
                    most_neg = obj[j];
                }
            }
            if (pc == n_total) return true;
            // exact minimum ratio over eligible rows
            double min_ratio = 0.0;
            bool found = false, positive_below_tol = false;
            for (size_t i = 0; i < m; ++i) {
                if (T[i][pc] > opts.pivot_tol) {
                    double ratio = std::max(0.0, T[i][n_total]) / T[i][pc];
                    if (!found || ratio < min_ratio) {
                        min_ratio = ratio;
                        found = true;
                    }
                } else if (T[i][pc] > 0.0) {
                    positive_below_tol = true;
                }
            }
            if (!found) {
                if (positive_below_tol)
                    throw NumericalError("all eligible pivots are below the pivot tolerance");
                return false;  // unbounded
            }
            // near-tied rows: Bland mode takes the lowest basis index,
            // otherwise the largest pivot element for stability
            double tie = min_ratio + 1e-9 * (1.0 + std::fabs(min_ratio));
            size_t pr = m;
            for (size_t i = 0; i < m; ++i) {
                if (T[i][pc] <= opts.pivot_tol) continue;
                double ratio = std::max(0.0, T[i][n_total]) / T[i][pc];
                if (ratio > tie) continue;
                if (pr == m) pr = i;
                else if (bland ? basis[i] < basis[pr] : T[i][pc] > T[pr][pc]) pr = i;
            }
            pivot(pr, pc);
            if (obj[n_total] > last_obj + 1e-12) {
                stall = 0;
                last_obj = obj[n_total];
            } else {
                ++stall;
            }
        }
    }
};

Solution simplex(const Standard& st, const LinearModel& model, const SolverOptions& opts) {
    size_t m = st.A.size();
    size_t n = st.c.size();
    // rhs-nonnegative copy
    std::vector<std::vector<double>> A = st.A;
    std::vector<double> b = st.b;
    std::vector<Sense> sense = st.sense;
    for (size_t i = 0; i < m; ++i) {
        if (b[i] < 0) {
            for (auto& x : A[i]) x = -x;
            b[i] = -b[i];
            if (sense[i] == Sense::Le) sense[i] = Sense::Ge;
            else if (sense[i] == Sense::Ge) sense[i] = Sense::Le;
        }
    }
    // helper columns
    Tableau tab(opts);
    tab.m = m;
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    size_t extra = 0;
    for (size_t i = 0; i < m; ++i) {
        if (sense[i] == Sense::Le) extra += 1;
        else if (sense[i] == Sense::Ge) extra += 2;
        else extra += 1;
    }
    tab.n_total = n + extra;
    tab.T.assign(m, std::vector<double>(tab.n_total + 1, 0.0));
    tab.role.assign(tab.n_total, ColRole::Structural);
    tab.basis.assign(m, -1);
    size_t next = n;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) tab.T[i][j] = A[i][j];
        tab.T[i][tab.n_total] = b[i];
        if (sense[i] == Sense::Le) {
            tab.T[i][next] = 1.0;
            tab.role[next] = ColRole::Slack;
            slack_col[i] = (int)next;
            tab.basis[i] = (int)next;
            ++next;
        } else if (sense[i] == Sense::Ge) {
            tab.T[i][next] = -1.0;
            tab.role[next] = ColRole::Surplus;
            slack_col[i] = (int)next;
            ++next;
            tab.T[i][next] = 1.0;
            tab.role[next] = ColRole::Artificial;
            art_col[i] = (int)next;
            tab.basis[i] = (int)next;
            ++next;
        } else {
            tab.T[i][next] = 1.0;
            tab.role[next] = ColRole::Artificial;
            art_col[i] = (int)next;
            tab.basis[i] = (int)next;
            ++next;
        }
    }
    // Phase 1: maximize -sum(artificials)
    bool need_phase1 = false;
    for (size_t i = 0; i < m; ++i)
        if (art_col[i] >= 0) need_phase1 = true;
    if (need_phase1) {
        tab.obj.assign(tab.n_total + 1, 0.0);
        for (size_t j = 0; j < tab.n_total; ++j)
            if (tab.role[j] == ColRole::Artificial) tab.obj[j] = 1.0;  // -c_j with c_j = -1
        // eliminate basic artificials from the objective row
        for (size_t i = 0; i < m; ++i) {
            if (tab.role[tab.basis[i]] == ColRole::Artificial) {
                for (size_t j = 0; j <= tab.n_total; ++j) tab.obj[j] -= tab.T[i][j];
            }
        }
        if (!tab.iterate(false))
            throw NumericalError("phase-1 reported unbounded");
        double infeas = -tab.obj[tab.n_total];
        if (infeas > opts.feas_tol) {
            Solution sol;
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        // drive remaining basic artificials (at value 0) out of the basis
        for (size_t i = 0; i < m; ++i) {
            if (tab.role[tab.basis[i]] != ColRole::Artificial) continue;
            size_t pc = tab.n_total;
            for (size_t j = 0; j < tab.n_total; ++j) {
                if (tab.role[j] == ColRole::Artificial) continue;
                if (std::fabs(tab.T[i][j]) > 1e-7) {
                    pc = j;
                    break;
                }
            }
            if (pc < tab.n_total) tab.pivot(i, pc);
            // an all-zero row is redundant; its artificial stays basic at 0
        }
    }
    // Phase 2 objective row
    tab.obj.assign(tab.n_total + 1, 0.0);
    for (size_t j = 0; j < n; ++j) tab.obj[j] = -st.c[j];
    for (size_t i = 0; i < m; ++i) {
        int bcol = tab.basis[i];
        double cb = bcol < (int)n ? st.c[bcol] : 0.0;
        if (cb != 0.0)
            for (size_t j = 0; j <= tab.n_total; ++j) tab.obj[j] += cb * tab.T[i][j];
    }
    if (!tab.iterate(true)) {
        Solution sol;
        sol.status = SolveStatus::Unbounded;
        return sol;
    }
    // extract primal values
    std::vector<double> x(n, 0.0);
    for (size_t i = 0; i < m; ++i)
        if (tab.basis[i] >= 0 && tab.basis[i] < (int)n) x[tab.basis[i]] = tab.T[i][tab.n_total];

    Solution sol;
    sol.status = SolveStatus::Optimal;
    std::vector<double> orig(st.n_orig, 0.0);
    for (size_t k = 0; k < st.n_orig; ++k) orig[k] = 0.0;
    // reconstruct: start from offsets, add column contributions
    std::vector<bool> seen(st.n_orig, false);
    for (size_t j = 0; j < st.cols.size(); ++j) {
        const auto& col = st.cols[j];
        if (!seen[col.orig_var]) {
            orig[col.orig_var] = col.offset;
            seen[col.orig_var] = true;
        }
        orig[col.orig_var] += col.scale * x[j];
    }
    for (size_t k = 0; k < st.n_orig; ++k) sol.values[model.variables[k].name] = orig[k];
    double inner = tab.obj[tab.n_total];
    sol.objective = st.c0 + st.s * inner;
    // dual reconstruction from helper columns (weak duality check material)
    double dual_inner = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double y;
        if (art_col[i] >= 0) y = tab.obj[art_col[i]];
        else if (sense[i] == Sense::Le) y = tab.obj[slack_col[i]];
        else y = -tab.obj[slack_col[i]];
        dual_inner += y * b[i];
    }
    sol.dual_objective = st.c0 + st.s * dual_inner;
    return sol;
}

bool is_better(double a, double b, Objective sense) {
    return sense == Objective::Maximize ? a > b : a < b;
}

}  // namespace

Solution solve_lp(const LinearModel& model, const SolverOptions& opts) {
    require_valid(model);
    Standard st = to_standard(model);
    return simplex(st, model, opts);
}

double constraint_violation(const LinearModel& model,
                            const std::map<std::string, double>& values) {
    double worst = 0.0;
    auto value_of = [&](const std::string& name) {
        auto it = values.find(name);
        return it == values.end() ? 0.0 : it->second;
    };
    for (const auto& v : model.variables) {
        double x = value_of(v.name);
        if (std::isfinite(v.lower)) worst = std::max(worst, v.lower - x);
        if (std::isfinite(v.upper)) worst = std::max(worst, x - v.upper);
    }
    for (const auto& c : model.constraints) {
        double lhs = c.expr.constant;
        for (const auto& t : c.expr.terms) lhs += t.coeff * value_of(t.var);
        switch (c.sense) {
            case Sense::Le: worst = std::max(worst, lhs - c.rhs); break;
            case Sense::Ge: worst = std::max(worst, c.rhs - lhs); break;
            case Sense::Eq: worst = std::max(worst, std::fabs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

namespace {

struct Node {
    double bound;  // LP relaxation objective
    std::map<int, std::pair<double, double>> overrides;  // var index -> (lb, ub)
};

}  // namespace

Solution solve_milp(const LinearModel& model, const SolverOptions& opts) {
    require_valid(model);
    bool any_int = false;
    for (const auto& v : model.variables)
        if (v.kind != VarKind::Continuous) any_int = true;
    if (!any_int) return solve_lp(model, opts);

    auto relax = [&](const std::map<int, std::pair<double, double>>& overrides) {
        LinearModel r = model;
        for (auto& v : r.variables) v.kind = VarKind::Continuous;
        for (auto& [k, bounds] : overrides) {
            r.variables[k].lower = std::max(r.variables[k].lower, bounds.first);
            r.variables[k].upper = std::min(r.variables[k].upper, bounds.second);
        }
        return r;
    };

    Objective sense = model.sense;
    auto cmp = [sense](const Node& a, const Node& b) {
        return sense == Objective::Maximize ? a.bound < b.bound : a.bound > b.bound;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);

    Solution root = solve_lp(relax({}), opts);
    if (root.status != SolveStatus::Optimal) return root;
    open.push({root.objective, {}});

    bool have_incumbent = false;
    Solution incumbent;
    long nodes = 0;
    double best_bound = root.objective;

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        best_bound = node.bound;
        if (have_incumbent) {
            double gap = std::fabs(best_bound - incumbent.objective) /
                         std::max(1e-10, std::fabs(incumbent.objective));
            if (gap <= opts.rel_gap || !is_better(best_bound, incumbent.objective, sense)) {
                incumbent.gap = std::max(0.0, gap);
                incumbent.status = SolveStatus::Optimal;
                return incumbent;
            }
        }
        if (++nodes > opts.node_limit) throw NodeLimitError("branch-and-bound node limit reached");
        Solution lp = solve_lp(relax(node.overrides), opts);
        if (lp.status != SolveStatus::Optimal) continue;  // pruned (infeasible)
        if (have_incumbent && !is_better(lp.objective, incumbent.objective, sense)) continue;

        // most fractional integer variable, ties by lowest index
        int branch_var = -1;
        double best_frac_dist = -1.0;
        for (size_t k = 0; k < model.variables.size(); ++k) {
            if (model.variables[k].kind == VarKind::Continuous) continue;
            double x = lp.values.at(model.variables[k].name);
            double frac = x - std::floor(x);
            double dist = std::min(frac, 1.0 - frac);
            if (dist > opts.int_tol && dist > best_frac_dist + 1e-12) {
                best_frac_dist = dist;
                branch_var = (int)k;
            }
        }
        if (branch_var < 0) {
            // integral: candidate incumbent
            if (!have_incumbent || is_better(lp.objective, incumbent.objective, sense)) {
                incumbent = lp;
                have_incumbent = true;
            }
            continue;
        }
        double x = lp.values.at(model.variables[branch_var].name);
        Node down = node, up = node;
        auto clamp = [&](Node& nd, int k, double lo, double hi) {
            auto it = nd.overrides.find(k);
            if (it == nd.overrides.end())
                nd.overrides[k] = {lo, hi};
            else {
                it->second.first = std::max(it->second.first, lo);
                it->second.second = std::min(it->second.second, hi);
            }
        };
        clamp(down, branch_var, -kInf, std::floor(x));
        clamp(up, branch_var, std::ceil(x), kInf);
        down.bound = lp.objective;
        up.bound = lp.objective;
        open.push(down);
        open.push(up);
    }
    if (have_incumbent) {
        incumbent.status = SolveStatus::Optimal;
        incumbent.gap = 0.0;
        return incumbent;
    }
    Solution sol;
    sol.status = root.status == SolveStatus::Unbounded ? SolveStatus::Unbounded
                                                       : SolveStatus::Infeasible;
    // An unbounded relaxation with no incumbent is reported as unbounded only
    // when the relaxation itself was unbounded; otherwise infeasible.
    if (root.status == SolveStatus::Optimal) sol.status = SolveStatus::Infeasible;
    return sol;
}

Solution brute_force(const LinearModel& model,
                     const std::map<std::string, std::pair<long, long>>& box,
                     const SolverOptions& opts) {
    require_valid(model);
    size_t n = model.variables.size();
    std::vector<long> lo(n), hi(n);
    long long total = 1;
    for (size_t k = 0; k < n; ++k) {
        const auto& v = model.variables[k];
        auto it = box.find(v.name);
        double l = v.lower, u = v.upper;
        if (it != box.end()) {
            l = std::max(l, (double)it->second.first);
            u = std::min(u, (double)it->second.second);
        }
        if (!std::isfinite(l) || !std::isfinite(u))
            throw EnumerationLimitError("variable '" + v.name + "' has no finite range");
        lo[k] = (long)std::ceil(l - 1e-9);
        hi[k] = (long)std::floor(u + 1e-9);
        long count = hi[k] >= lo[k] ? hi[k] - lo[k] + 1 : 0;
        if (count == 0) {
            Solution sol;
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        total *= count;
        if (total > opts.enum_limit)
            throw EnumerationLimitError("enumeration count exceeds the limit");
    }
    std::vector<long> x(lo.begin(), lo.end());
    Solution best;
    best.status = SolveStatus::Infeasible;
    for (;;) {
        std::map<std::string, double> values;
        for (size_t k = 0; k < n; ++k) values[model.variables[k].name] = (double)x[k];
        if (constraint_violation(model, values) <= opts.feas_tol) {
            double obj = model.objective.constant;
            for (const auto& t : model.objective.terms) obj += t.coeff * values[t.var];
            if (best.status != SolveStatus::Optimal ||
                is_better(obj, best.objective, model.sense)) {
                best.status = SolveStatus::Optimal;
                best.objective = obj;
                best.values = values;
            }
        }
        size_t k = 0;
        while (k < n && ++x[k] > hi[k]) {
            x[k] = lo[k];
            ++k;
        }
        if (k == n) break;
    }
    return best;
}

}  // namespace leanopt
