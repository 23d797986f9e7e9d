#include "leanopt/canonical.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

namespace leanopt {

namespace {

std::string quantize(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x == 0.0 ? 0.0 : x);
    return buf;
}

bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

struct Row {
    Sense sense;
    double rhs;
    std::vector<std::pair<int, double>> terms;  // (var index, coeff), sorted by index
};

struct Flat {
    Objective sense;
    std::vector<Variable> vars;
    std::vector<double> obj;  // dense objective coefficients
    double obj_const = 0.0;
    std::vector<Row> rows;
};

Flat flatten(const LinearModel& model) {
    LinearModel m = normalized_copy(model);
    Flat f;
    f.sense = m.sense;
    f.vars = m.variables;
    f.obj.assign(m.variables.size(), 0.0);
    f.obj_const = m.objective.constant;
    std::map<std::string, int> index;
    for (size_t i = 0; i < m.variables.size(); ++i) index[m.variables[i].name] = (int)i;
    for (const auto& t : m.objective.terms) f.obj[index.at(t.var)] = t.coeff;
    for (const auto& c : m.constraints) {
        Row r;
        r.sense = c.sense;
        r.rhs = c.rhs;
        for (const auto& t : c.expr.terms) r.terms.push_back({index.at(t.var), t.coeff});
        std::sort(r.terms.begin(), r.terms.end());
        f.rows.push_back(std::move(r));
    }
    return f;
}

// Rename-invariant orientation of an equality row: pick the sign whose sorted
// coefficient multiset (rhs appended) is lexicographically smaller. Returns
// true when the two orientations are indistinguishable by content, in which
// case callers must hash the row sign-symmetrically.
bool orient_eq_row_content(Row& r) {
    if (r.sense != Sense::Eq) return false;
    std::vector<std::string> fwd, rev;
    for (auto& [i, c] : r.terms) {
        fwd.push_back(quantize(c));
        rev.push_back(quantize(-c));
    }
    fwd.push_back(quantize(r.rhs));
    rev.push_back(quantize(-r.rhs));
    std::sort(fwd.begin(), fwd.end());
    std::sort(rev.begin(), rev.end());
    if (rev < fwd) {
        for (auto& [i, c] : r.terms) c = -c;
        r.rhs = -r.rhs;
    }
    return fwd == rev;
}

// Hash key for one coefficient; sign-symmetric for ambiguous equality rows.
std::string coeff_key(double c, bool sym) {
    if (!sym) return quantize(c);
    std::string a = quantize(c), b = quantize(-c);
    return a < b ? a + "~" + b : b + "~" + a;
}

struct Colors {
    std::vector<std::uint64_t> var;
    std::vector<std::uint64_t> row;
};

// Iterated hashing of variable neighborhoods in the constraint bipartite graph.
// Colors are content-derived, so they are comparable across two models.
Colors refine(const Flat& f) {
    size_t nv = f.vars.size(), nr = f.rows.size();
    Colors c;
    c.var.resize(nv);
    c.row.resize(nr);
    for (size_t i = 0; i < nv; ++i) {
        const auto& v = f.vars[i];
        std::string s = std::to_string((int)v.kind) + "|" + quantize(v.lower) + "|" +
                        quantize(v.upper) + "|" + quantize(f.obj[i]);
        c.var[i] = fnv1a(s);
    }
    std::vector<Row> rows = f.rows;
    std::vector<char> sym(nr, 0);
    for (size_t j = 0; j < nr; ++j) sym[j] = orient_eq_row_content(rows[j]) ? 1 : 0;
    for (size_t j = 0; j < nr; ++j) {
        const auto& r = rows[j];
        std::string s = std::to_string((int)r.sense) + "|" + coeff_key(r.rhs, sym[j]);
        std::vector<std::string> coeffs;
        for (auto& [i, co] : r.terms) coeffs.push_back(coeff_key(co, sym[j]));
        std::sort(coeffs.begin(), coeffs.end());
        for (auto& t : coeffs) s += "|" + t;
        c.row[j] = fnv1a(s);
    }
    // incidence lists
    std::vector<std::vector<std::pair<int, double>>> var_rows(nv);
    for (size_t j = 0; j < nr; ++j)
        for (auto& [i, co] : rows[j].terms) var_rows[i].push_back({(int)j, co});

    auto partition_of = [](const std::vector<std::uint64_t>& cs) {
        std::vector<std::uint64_t> s = cs;
        std::sort(s.begin(), s.end());
        return s;
    };
    for (size_t iter = 0; iter < nv + nr + 2; ++iter) {
        auto old_vp = partition_of(c.var);
        auto old_rp = partition_of(c.row);
        std::vector<std::uint64_t> nvar(nv), nrow(nr);
        for (size_t i = 0; i < nv; ++i) {
            std::vector<std::uint64_t> neigh;
            for (auto& [j, co] : var_rows[i])
                neigh.push_back(hash_combine(c.row[j], fnv1a(coeff_key(co, sym[j]))));
            std::sort(neigh.begin(), neigh.end());
            std::uint64_t h = c.var[i];
            for (auto x : neigh) h = hash_combine(h, x);
            nvar[i] = h;
        }
        for (size_t j = 0; j < nr; ++j) {
            std::vector<std::uint64_t> neigh;
            for (auto& [i, co] : rows[j].terms)
                neigh.push_back(hash_combine(c.var[i], fnv1a(coeff_key(co, sym[j]))));
            std::sort(neigh.begin(), neigh.end());
            std::uint64_t h = c.row[j];
            for (auto x : neigh) h = hash_combine(h, x);
            nrow[j] = h;
        }
        c.var = std::move(nvar);
        c.row = std::move(nrow);
        if (partition_of(c.var) == old_vp && partition_of(c.row) == old_rp) break;
    }
    return c;
}

// Serialization of the model under a given variable ordering (position of each
// original index). Equality rows are oriented so the term with the smallest
// canonical index is positive.
std::string serialize(const Flat& f, const std::vector<int>& pos) {
    std::string out = f.sense == Objective::Maximize ? "max\n" : "min\n";
    size_t nv = f.vars.size();
    std::vector<int> orig(nv);  // canonical position -> original index
    for (size_t i = 0; i < nv; ++i) orig[pos[i]] = (int)i;
    for (size_t p = 0; p < nv; ++p) {
        const auto& v = f.vars[orig[p]];
        out += "v" + std::to_string(p) + ":" + std::to_string((int)v.kind) + "," +
               quantize(v.lower) + "," + quantize(v.upper) + "\n";
    }
    out += "obj:";
    for (size_t p = 0; p < nv; ++p) {
        double c = f.obj[orig[p]];
        if (c != 0.0) out += std::to_string(p) + "*" + quantize(c) + " ";
    }
    out += "+" + quantize(f.obj_const) + "\n";
    std::vector<std::string> rows;
    for (const auto& r : f.rows) {
        std::vector<std::pair<int, double>> terms;
        for (auto& [i, c] : r.terms) terms.push_back({pos[i], c});
        std::sort(terms.begin(), terms.end());
        double rhs = r.rhs;
        if (r.sense == Sense::Eq && !terms.empty() && terms.front().second < 0) {
            for (auto& [p, c] : terms) c = -c;
            rhs = -rhs;
        }
        std::string s = std::to_string((int)r.sense) + ":";
        for (auto& [p, c] : terms) s += std::to_string(p) + "*" + quantize(c) + " ";
        s += "<>" + quantize(rhs);
        rows.push_back(std::move(s));
    }
    std::sort(rows.begin(), rows.end());
    for (auto& s : rows) out += s + "\n";
    return out;
}

struct LabelSearch {
    const Flat& f;
    const Colors& colors;
    long budget;
    std::string best;
    bool have_best = false;

    void run(std::vector<int>& order, std::vector<char>& used,
             const std::vector<std::vector<int>>& classes, size_t ci) {
        if (ci == classes.size()) {
            std::vector<int> pos(f.vars.size());
            for (size_t p = 0; p < order.size(); ++p) pos[order[p]] = (int)p;
            std::string s = serialize(f, pos);
            if (!have_best || s < best) {
                best = std::move(s);
                have_best = true;
            }
            return;
        }
        permute(order, used, classes, ci, 0);
    }

    void permute(std::vector<int>& order, std::vector<char>& used,
                 const std::vector<std::vector<int>>& classes, size_t ci, size_t depth) {
        const auto& cls = classes[ci];
        if (depth == cls.size()) {
            run(order, used, classes, ci + 1);
            return;
        }
        for (int v : cls) {
            if (used[v]) continue;
            if (--budget < 0)
                throw AmbiguityError("canonical labeling exceeded the search budget");
            used[v] = 1;
            order.push_back(v);
            permute(order, used, classes, ci, depth + 1);
            order.pop_back();
            used[v] = 0;
        }
    }
};

std::vector<std::vector<int>> color_classes(const std::vector<std::uint64_t>& colors) {
    std::map<std::uint64_t, std::vector<int>> by_color;
    for (size_t i = 0; i < colors.size(); ++i) by_color[colors[i]].push_back((int)i);
    std::vector<std::vector<int>> out;
    for (auto& [c, members] : by_color) out.push_back(std::move(members));
    return out;
}

}  // namespace

LinearModel normalized_copy(const LinearModel& model) {
    LinearModel m = model;
    m.objective.normalize();
    for (auto& c : m.constraints) {
        c.expr.normalize();
        if (c.sense == Sense::Ge) {
            for (auto& t : c.expr.terms) t.coeff = -t.coeff;
            c.rhs = -(c.rhs - c.expr.constant);
            c.sense = Sense::Le;
        } else {
            c.rhs -= c.expr.constant;
        }
        c.expr.constant = 0.0;
    }
    return m;
}

CanonicalForm canonicalize(const LinearModel& model, const CanonicalOptions& opts) {
    require_valid(model);
    Flat f = flatten(model);
    Colors colors = refine(f);
    auto classes = color_classes(colors.var);
    bool ambiguous = classes.size() < f.vars.size();
    if (ambiguous && (int)f.vars.size() > opts.exhaustive_cap)
        throw AmbiguityError("signature refinement left ties and the model exceeds the "
                             "exhaustive-matching cap");
    LabelSearch search{f, colors, opts.node_budget};
    std::vector<int> order;
    std::vector<char> used(f.vars.size(), 0);
    search.run(order, used, classes, 0);

    CanonicalForm cf;
    cf.signature = std::move(search.best);
    cf.fingerprint = fnv1a(cf.signature);
    // Recover the minimizing order for reporting.
    // (Re-run serialization comparisons is avoided: order is informative only,
    // derived from the deterministic class ordering when unambiguous.)
    for (const auto& cls : classes)
        for (int v : cls) cf.variable_order.push_back(f.vars[v].name);
    return cf;
}

namespace {

struct MatchSearch {
    const Flat& a;
    const Flat& b;
    const CanonicalOptions& opts;
    long budget;
    std::vector<int> map_ab;  // a index -> b index
    std::vector<char> used_b;

    bool rows_match(const Row& ra, const Row& rb, bool flipped) const {
        if (ra.sense != rb.sense) return false;
        if (ra.terms.size() != rb.terms.size()) return false;
        double sign = flipped ? -1.0 : 1.0;
        if (!close(sign * ra.rhs, rb.rhs, opts.rel_tol)) return false;
        std::vector<std::pair<int, double>> mapped;
        for (auto& [i, c] : ra.terms) mapped.push_back({map_ab[i], sign * c});
        std::sort(mapped.begin(), mapped.end());
        for (size_t k = 0; k < mapped.size(); ++k) {
            if (mapped[k].first != rb.terms[k].first) return false;
            if (!close(mapped[k].second, rb.terms[k].second, opts.rel_tol)) return false;
        }
        return true;
    }

    bool match_rows(size_t ai, std::vector<char>& used_rows) {
        if (ai == a.rows.size()) return true;
        for (size_t bj = 0; bj < b.rows.size(); ++bj) {
            if (used_rows[bj]) continue;
            bool ok = rows_match(a.rows[ai], b.rows[bj], false) ||
                      (a.rows[ai].sense == Sense::Eq && rows_match(a.rows[ai], b.rows[bj], true));
            if (!ok) continue;
            used_rows[bj] = 1;
            if (match_rows(ai + 1, used_rows)) return true;
            used_rows[bj] = 0;
        }
        return false;
    }

    bool verify() {
        for (size_t i = 0; i < a.vars.size(); ++i) {
            const auto& va = a.vars[i];
            const auto& vb = b.vars[map_ab[i]];
            if (va.kind != vb.kind) return false;
            bool lb_ok = (std::isinf(va.lower) && std::isinf(vb.lower)) ||
                         close(va.lower, vb.lower, opts.rel_tol);
            bool ub_ok = (std::isinf(va.upper) && std::isinf(vb.upper)) ||
                         close(va.upper, vb.upper, opts.rel_tol);
            if (!lb_ok || !ub_ok) return false;
            if (!close(a.obj[i], b.obj[map_ab[i]], opts.rel_tol)) return false;
        }
        if (!close(a.obj_const, b.obj_const, opts.rel_tol)) return false;
        std::vector<char> used_rows(b.rows.size(), 0);
        return match_rows(0, used_rows);
    }

    bool assign(const std::vector<std::vector<int>>& order,
                const std::vector<std::vector<int>>& candidates, size_t ci, size_t depth) {
        if (ci == order.size()) return verify();
        if (depth == order[ci].size()) return assign(order, candidates, ci + 1, 0);
        int av = order[ci][depth];
        for (int bv : candidates[ci]) {
            if (used_b[bv]) continue;
            if (--budget < 0)
                throw AmbiguityError("equivalence search exceeded the node budget");
            used_b[bv] = 1;
            map_ab[av] = bv;
            if (assign(order, candidates, ci, depth + 1)) return true;
            used_b[bv] = 0;
        }
        return false;
    }
};

}  // namespace

EquivalenceResult models_equivalent(const LinearModel& a, const LinearModel& b,
                                    const CanonicalOptions& opts) {
    require_valid(a);
    require_valid(b);
    Flat fa = flatten(a), fb = flatten(b);
    if (fa.sense != fb.sense || fa.vars.size() != fb.vars.size() ||
        fa.rows.size() != fb.rows.size())
        return {};
    Colors ca = refine(fa), cb = refine(fb);
    {
        auto sa = ca.var, sb = cb.var;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return {};
        auto ra = ca.row, rb = cb.row;
        std::sort(ra.begin(), ra.end());
        std::sort(rb.begin(), rb.end());
        if (ra != rb) return {};
    }
    auto classes_a = color_classes(ca.var);
    bool ambiguous = classes_a.size() < fa.vars.size();
    if (ambiguous && (int)fa.vars.size() > opts.exhaustive_cap)
        throw AmbiguityError("signature refinement left ties and the model exceeds the "
                             "exhaustive-matching cap");
    std::map<std::uint64_t, std::vector<int>> b_by_color;
    for (size_t i = 0; i < cb.var.size(); ++i) b_by_color[cb.var[i]].push_back((int)i);
    std::vector<std::vector<int>> order, candidates;
    for (auto& cls : classes_a) {
        order.push_back(cls);
        candidates.push_back(b_by_color.at(ca.var[cls.front()]));
    }
    MatchSearch search{fa, fb, opts, opts.node_budget,
                       std::vector<int>(fa.vars.size(), -1),
                       std::vector<char>(fb.vars.size(), 0)};
    if (!search.assign(order, candidates, 0, 0)) return {};
    EquivalenceResult res;
    res.equivalent = true;
    std::vector<std::pair<std::string, std::string>> witness;
    for (size_t i = 0; i < fa.vars.size(); ++i)
        witness.push_back({fa.vars[i].name, fb.vars[search.map_ab[i]].name});
    res.mapping = std::move(witness);
    return res;
}

}  // namespace leanopt
