#include "leanopt/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

namespace leanopt {

void RetrievedData::merge(const RetrievedData& other) {
    for (const auto& [k, v] : other.sets) sets[k] = v;
    for (const auto& [k, v] : other.scalars) scalars[k] = v;
    for (const auto& [k, v] : other.arrays) arrays[k] = v;
    for (const auto& [k, v] : other.matrices) matrices[k] = v;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// ---------- retrieved-information parsing ----------

// Parses "[1, 2, 3]" or "[[1, 2], [3, 4]]" starting at s[i] == '['.
std::vector<std::vector<double>> parse_bracket_list(const std::string& s, size_t& i) {
    auto skip_ws = [&] { while (i < s.size() && std::isspace((unsigned char)s[i])) ++i; };
    auto parse_number = [&]() -> double {
        skip_ws();
        char* end = nullptr;
        double v = std::strtod(s.c_str() + i, &end);
        if (end == s.c_str() + i) throw GrammarError("expected a number in '" + s + "'");
        i = end - s.c_str();
        return v;
    };
    skip_ws();
    if (i >= s.size() || s[i] != '[') throw GrammarError("expected '[' in '" + s + "'");
    ++i;
    skip_ws();
    std::vector<std::vector<double>> rows;
    if (i < s.size() && s[i] == '[') {
        // matrix
        while (true) {
            size_t save = i;
            auto inner = parse_bracket_list(s, i);
            if (inner.size() != 1) throw GrammarError("nested list too deep in '" + s + "'");
            (void)save;
            rows.push_back(inner[0]);
            skip_ws();
            if (i < s.size() && s[i] == ',') {
                ++i;
                skip_ws();
                continue;
            }
            break;
        }
    } else if (i < s.size() && s[i] == ']') {
        rows.push_back({});
    } else {
        std::vector<double> row;
        while (true) {
            row.push_back(parse_number());
            skip_ws();
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        rows.push_back(std::move(row));
    }
    skip_ws();
    if (i >= s.size() || s[i] != ']') throw GrammarError("missing ']' in '" + s + "'");
    ++i;
    return rows;
}

bool valid_name(const std::string& s) {
    if (s.empty() || !(std::isalpha((unsigned char)s[0]) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum((unsigned char)c) || c == '_')) return false;
    return true;
}

}  // namespace

RetrievedData parse_retrieved(const std::string& text) {
    RetrievedData out;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.rfind("set ", 0) == 0) {
            // set NAME = LO..HI
            std::string rest = trim(line.substr(4));
            size_t eq = rest.find('=');
            if (eq == std::string::npos) throw GrammarError("malformed set declaration: " + line);
            std::string name = trim(rest.substr(0, eq));
            std::string range = trim(rest.substr(eq + 1));
            size_t dots = range.find("..");
            if (!valid_name(name) || dots == std::string::npos)
                throw GrammarError("malformed set declaration: " + line);
            try {
                long lo = std::stol(trim(range.substr(0, dots)));
                long hi = std::stol(trim(range.substr(dots + 2)));
                if (lo > hi) throw GrammarError("empty range in set declaration: " + line);
                out.sets[name] = {lo, hi};
            } catch (const std::invalid_argument&) {
                throw GrammarError("malformed set declaration: " + line);
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw GrammarError("unrecognized retrieved-information line: " + line);
        std::string name = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_name(name))
            throw GrammarError("bad parameter name in retrieved information: " + line);
        if (!value.empty() && value[0] == '[') {
            size_t i = 0;
            auto rows = parse_bracket_list(value, i);
            if (trim(value.substr(i)).size())
                throw GrammarError("trailing text after list: " + line);
            if (rows.size() == 1)
                out.arrays[name] = rows[0];
            else
                out.matrices[name] = rows;
        } else {
            char* end = nullptr;
            double v = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || trim(value.substr(end - value.c_str())).size())
                throw GrammarError("bad scalar value: " + line);
            out.scalars[name] = v;
        }
    }
    return out;
}

namespace {

// ---------- expression tokenizer ----------

struct Tok {
    enum Kind {
        Name,     // identifier, possibly with subscript text
        Number,
        Plus, Minus, Star, LParen, RParen, Comma,
        LBrace, RBrace, DotDot,
        Le, Ge, Eq,
        End
    } kind = End;
    std::string text;      // identifier base
    std::string subscript; // raw subscript ("i,t-1"); empty when none
    double value = 0.0;
};

std::vector<Tok> lex(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0, n = line.size();
    auto fail = [&](const std::string& msg) { throw GrammarError(msg + " in '" + line + "'"); };
    while (i < n) {
        char c = line[i];
        if (std::isspace((unsigned char)c)) {
            ++i;
        } else if (std::isalpha((unsigned char)c)) {
            size_t j = i;
            while (j < n && std::isalnum((unsigned char)line[j])) ++j;
            Tok t;
            t.kind = Tok::Name;
            t.text = line.substr(i, j - i);
            i = j;
            if (i < n && line[i] == '_') {
                ++i;
                if (i < n && line[i] == '{') {
                    size_t close = line.find('}', i + 1);
                    if (close == std::string::npos) fail("missing '}'");
                    t.subscript = line.substr(i + 1, close - i - 1);
                    i = close + 1;
                } else {
                    size_t k = i;
                    while (k < n && (std::isalnum((unsigned char)line[k]))) ++k;
                    if (k == i) fail("dangling '_'");
                    t.subscript = line.substr(i, k - i);
                    i = k;
                }
            }
            out.push_back(t);
        } else if (std::isdigit((unsigned char)c) ||
                   (c == '.' && i + 1 < n && std::isdigit((unsigned char)line[i + 1]))) {
            size_t j = i;
            while (j < n && std::isdigit((unsigned char)line[j])) ++j;
            if (j < n && line[j] == '.' && !(j + 1 < n && line[j + 1] == '.')) {
                ++j;
                while (j < n && std::isdigit((unsigned char)line[j])) ++j;
            }
            if (j < n && (line[j] == 'e' || line[j] == 'E')) {
                size_t k = j + 1;
                if (k < n && (line[k] == '+' || line[k] == '-')) ++k;
                if (k < n && std::isdigit((unsigned char)line[k])) {
                    ++k;
                    while (k < n && std::isdigit((unsigned char)line[k])) ++k;
                    j = k;
                }
            }
            Tok t;
            t.kind = Tok::Number;
            t.text = line.substr(i, j - i);
            t.value = std::strtod(t.text.c_str(), nullptr);
            out.push_back(t);
            i = j;
        } else if (c == '.' && i + 1 < n && line[i + 1] == '.') {
            out.push_back({Tok::DotDot, "..", "", 0});
            i += 2;
        } else if (c == '<' && i + 1 < n && line[i + 1] == '=') {
            out.push_back({Tok::Le, "<=", "", 0});
            i += 2;
        } else if (c == '>' && i + 1 < n && line[i + 1] == '=') {
            out.push_back({Tok::Ge, ">=", "", 0});
            i += 2;
        } else if (c == '=') {
            ++i;
            if (i < n && line[i] == '=') ++i;
            out.push_back({Tok::Eq, "=", "", 0});
        } else if (c == '+') {
            out.push_back({Tok::Plus, "+", "", 0});
            ++i;
        } else if (c == '-') {
            out.push_back({Tok::Minus, "-", "", 0});
            ++i;
        } else if (c == '*') {
            out.push_back({Tok::Star, "*", "", 0});
            ++i;
        } else if (c == '(') {
            out.push_back({Tok::LParen, "(", "", 0});
            ++i;
        } else if (c == ')') {
            out.push_back({Tok::RParen, ")", "", 0});
            ++i;
        } else if (c == ',') {
            out.push_back({Tok::Comma, ",", "", 0});
            ++i;
        } else if (c == '{') {
            out.push_back({Tok::LBrace, "{", "", 0});
            ++i;
        } else if (c == '}') {
            out.push_back({Tok::RBrace, "}", "", 0});
            ++i;
        } else {
            fail(std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", "", 0});
    return out;
}

// ---------- index and binder specs ----------

struct IndexTerm {
    bool literal = false;
    long value = 0;          // literal index
    std::string binder;      // binder name
    long offset = 0;         // binder + offset
};

IndexTerm parse_index_item(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw GrammarError("empty index item");
    IndexTerm t;
    if (std::isdigit((unsigned char)s[0]) || s[0] == '-') {
        t.literal = true;
        t.value = std::stol(s);
        return t;
    }
    size_t j = 0;
    while (j < s.size() && std::isalnum((unsigned char)s[j])) ++j;
    t.binder = s.substr(0, j);
    std::string rest = trim(s.substr(j));
    if (!rest.empty()) {
        if (rest[0] != '+' && rest[0] != '-')
            throw GrammarError("bad index expression: " + raw);
        t.offset = std::stol(rest);
    }
    return t;
}

std::vector<IndexTerm> parse_subscript(const std::string& raw) {
    std::vector<IndexTerm> out;
    std::string cur;
    for (char c : raw) {
        if (c == ',') {
            out.push_back(parse_index_item(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(parse_index_item(cur));
    if (out.empty()) throw GrammarError("empty subscript");
    return out;
}

struct SetSpec {
    enum Kind { Named, Range, Infer } kind = Infer;
    std::string name;
    long lo = 0, hi = 0;
};

struct Binder {
    std::string var;
    SetSpec set;
};

// "i", "i in I", "t in 2..4"
Binder parse_binder_text(const std::string& raw) {
    auto toks = lex(raw);
    size_t i = 0;
    if (toks[i].kind != Tok::Name) throw GrammarError("bad binder: " + raw);
    Binder b;
    b.var = toks[i].text;
    if (!toks[i].subscript.empty()) throw GrammarError("bad binder: " + raw);
    ++i;
    if (toks[i].kind == Tok::End) return b;
    if (toks[i].kind != Tok::Name || toks[i].text != "in")
        throw GrammarError("bad binder: " + raw);
    ++i;
    if (toks[i].kind == Tok::Name) {
        b.set.kind = SetSpec::Named;
        b.set.name = toks[i].text;
        return b;
    }
    if (toks[i].kind == Tok::Number && toks[i + 1].kind == Tok::DotDot &&
        toks[i + 2].kind == Tok::Number) {
        b.set.kind = SetSpec::Range;
        b.set.lo = (long)toks[i].value;
        b.set.hi = (long)toks[i + 2].value;
        return b;
    }
    throw GrammarError("bad binder: " + raw);
}

// ---------- AST ----------

struct Node;
using NodeP = std::unique_ptr<Node>;

struct Node {
    enum Kind { Num, Sym, Add, Sub, Mul, Neg, SumNode } kind = Num;
    double num = 0.0;
    std::string name;
    std::vector<IndexTerm> subs;
    Binder binder;  // SumNode
    NodeP a, b;
};

NodeP mk(Node::Kind k) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    return n;
}

// ---------- expression parser ----------

struct ExprParser {
    const std::vector<Tok>& toks;
    size_t i = 0;

    const Tok& cur() const { return toks[i]; }

    bool at_stop() const {
        const Tok& t = cur();
        if (t.kind == Tok::End || t.kind == Tok::Le || t.kind == Tok::Ge || t.kind == Tok::Eq ||
            t.kind == Tok::RParen || t.kind == Tok::Comma)
            return true;
        if (t.kind == Tok::Name && t.subscript.empty() &&
            (t.text == "forall" || t.text == "for" || t.text == "in"))
            return true;
        return false;
    }

    NodeP parse_expr() {
        NodeP left = parse_term();
        while (true) {
            if (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
                bool plus = cur().kind == Tok::Plus;
                ++i;
                NodeP right = parse_term();
                NodeP n = mk(plus ? Node::Add : Node::Sub);
                n->a = std::move(left);
                n->b = std::move(right);
                left = std::move(n);
            } else {
                break;
            }
        }
        return left;
    }

    NodeP parse_term() {
        NodeP left = parse_factor();
        while (true) {
            if (cur().kind == Tok::Star) {
                ++i;
                NodeP right = parse_factor();
                NodeP n = mk(Node::Mul);
                n->a = std::move(left);
                n->b = std::move(right);
                left = std::move(n);
            } else if (!at_stop() && (cur().kind == Tok::Name || cur().kind == Tok::Number ||
                                      cur().kind == Tok::LParen)) {
                // juxtaposition: "2 x", "0.9 sum(...)"
                NodeP right = parse_factor();
                NodeP n = mk(Node::Mul);
                n->a = std::move(left);
                n->b = std::move(right);
                left = std::move(n);
            } else {
                break;
            }
        }
        return left;
    }

    NodeP parse_factor() {
        const Tok& t = cur();
        if (t.kind == Tok::Minus) {
            ++i;
            NodeP n = mk(Node::Neg);
            n->a = parse_factor();
            return n;
        }
        if (t.kind == Tok::Plus) {
            ++i;
            return parse_factor();
        }
        if (t.kind == Tok::Number) {
            NodeP n = mk(Node::Num);
            n->num = t.value;
            ++i;
            return n;
        }
        if (t.kind == Tok::LParen) {
            ++i;
            NodeP n = parse_expr();
            if (cur().kind != Tok::RParen) throw GrammarError("missing ')'");
            ++i;
            return n;
        }
        if (t.kind == Tok::Name) {
            if (t.text == "sum") {
                if (t.subscript.empty()) throw GrammarError("sum without binder");
                NodeP n = mk(Node::SumNode);
                n->binder = parse_binder_text(t.subscript);
                ++i;
                n->a = parse_term();  // binds the whole product chain
                return n;
            }
            NodeP n = mk(Node::Sym);
            n->name = t.text;
            if (!t.subscript.empty()) n->subs = parse_subscript(t.subscript);
            ++i;
            return n;
        }
        throw GrammarError("unexpected token '" + t.text + "' in expression");
    }
};

// ---------- evaluation ----------

struct ModelBuilder {
    RetrievedData data;
    LinearModel model;
    std::map<std::string, int> var_index;
    // Index ranges seen per variable base name and subscript position, used to
    // infer bare "forall i" ranges on later lines (e.g. domain declarations).
    std::map<std::string, std::vector<std::pair<long, long>>> observed;

    int touch_var(const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        int idx = (int)model.variables.size();
        model.variables.push_back({name, 0.0, kInf, VarKind::Continuous});
        var_index[name] = idx;
        return idx;
    }

    long resolve_index(const IndexTerm& t, const std::map<std::string, long>& env) const {
        if (t.literal) return t.value;
        auto it = env.find(t.binder);
        if (it == env.end()) throw GrammarError("unbound index '" + t.binder + "'");
        return it->second + t.offset;
    }

    std::pair<long, long> resolve_set(const SetSpec& s,
                                      std::initializer_list<const Node*> bodies,
                                      const std::string& binder) const {
        if (s.kind == SetSpec::Range) return {s.lo, s.hi};
        if (s.kind == SetSpec::Named) {
            auto it = data.sets.find(s.name);
            if (it == data.sets.end())
                throw GrammarError("undeclared index set '" + s.name + "'");
            return it->second;
        }
        // a set declared under the binder's own name pins the range directly
        auto si = data.sets.find(binder);
        if (si != data.sets.end()) return si->second;
        // else infer from array lengths indexed by the bare binder, else from
        // the dimensions of variables already instantiated
        std::optional<long> len;
        std::optional<std::pair<long, long>> var_range;
        std::function<void(const Node*)> walk = [&](const Node* n) {
            if (!n) return;
            if (n->kind == Node::Sym) {
                auto ai = data.arrays.find(n->name);
                if (ai != data.arrays.end() && n->subs.size() == 1 && !n->subs[0].literal &&
                    n->subs[0].binder == binder && n->subs[0].offset == 0) {
                    long l = (long)ai->second.size();
                    if (len && *len != l)
                        throw GrammarError("index set '" + binder +
                                           "' inferred with conflicting array lengths");
                    len = l;
                }
                auto mi = data.matrices.find(n->name);
                if (mi != data.matrices.end() && !mi->second.empty()) {
                    for (size_t p = 0; p < n->subs.size() && p < 2; ++p) {
                        if (!n->subs[p].literal && n->subs[p].binder == binder &&
                            n->subs[p].offset == 0) {
                            long l = p == 0 ? (long)mi->second.size()
                                            : (long)mi->second.front().size();
                            if (len && *len != l)
                                throw GrammarError("index set '" + binder +
                                                   "' inferred with conflicting lengths");
                            len = l;
                        }
                    }
                }
                if (!data.has_param(n->name)) {
                    auto oi = observed.find(n->name);
                    if (oi != observed.end()) {
                        for (size_t p = 0; p < n->subs.size() && p < oi->second.size(); ++p) {
                            if (!n->subs[p].literal && n->subs[p].binder == binder &&
                                n->subs[p].offset == 0 && !var_range)
                                var_range = oi->second[p];
                        }
                    }
                }
            }
            walk(n->a.get());
            walk(n->b.get());
        };
        for (const Node* body : bodies) walk(body);
        if (len && var_range && *var_range != std::pair<long, long>(1, *len))
            throw GrammarError("length mismatch: index '" + binder + "' spans " +
                               std::to_string(var_range->first) + ".." +
                               std::to_string(var_range->second) + " but an array of length " +
                               std::to_string(*len) + " is indexed by it");
        if (len) return {1, *len};
        if (var_range) return *var_range;
        throw GrammarError("cannot infer the range of index '" + binder +
                           "' (nothing in scope fixes its length)");
    }

    std::string instance_name(const std::string& base, const std::vector<IndexTerm>& subs,
                              const std::map<std::string, long>& env) {
        std::string out = base;
        auto& dims = observed[base];
        if (dims.size() < subs.size()) dims.resize(subs.size(), {0, 0});
        for (size_t p = 0; p < subs.size(); ++p) {
            long k = resolve_index(subs[p], env);
            out += "_" + std::to_string(k);
            if (dims[p].first == 0 && dims[p].second == 0) dims[p] = {k, k};
            else {
                dims[p].first = std::min(dims[p].first, k);
                dims[p].second = std::max(dims[p].second, k);
            }
        }
        return out;
    }

    double param_value(const std::string& name, const std::vector<IndexTerm>& subs,
                       const std::map<std::string, long>& env) const {
        if (auto it = data.scalars.find(name); it != data.scalars.end()) {
            if (!subs.empty())
                throw GrammarError("scalar parameter '" + name + "' used with a subscript");
            return it->second;
        }
        if (auto it = data.arrays.find(name); it != data.arrays.end()) {
            if (subs.size() != 1)
                throw GrammarError("array parameter '" + name + "' needs one index");
            long k = resolve_index(subs[0], env);
            if (k < 1 || k > (long)it->second.size())
                throw GrammarError("index " + std::to_string(k) + " out of range for array '" +
                                   name + "' of length " + std::to_string(it->second.size()));
            return it->second[k - 1];
        }
        if (auto it = data.matrices.find(name); it != data.matrices.end()) {
            if (subs.size() != 2)
                throw GrammarError("matrix parameter '" + name + "' needs two indices");
            long r = resolve_index(subs[0], env);
            long c = resolve_index(subs[1], env);
            if (r < 1 || r > (long)it->second.size() || it->second.empty() || c < 1 ||
                c > (long)it->second.front().size())
                throw GrammarError("index out of range for matrix '" + name + "'");
            return it->second[r - 1][c - 1];
        }
        throw GrammarError("internal: '" + name + "' is not a parameter");
    }

    LinearExpr eval(const Node* n, std::map<std::string, long>& env) {
        LinearExpr out;
        switch (n->kind) {
            case Node::Num:
                out.constant = n->num;
                return out;
            case Node::Sym: {
                if (data.has_param(n->name)) {
                    out.constant = param_value(n->name, n->subs, env);
                    return out;
                }
                if (n->subs.empty() && env.count(n->name)) {
                    // a bare binder used as a value (index arithmetic in expressions)
                    out.constant = (double)env.at(n->name);
                    return out;
                }
                if (n->subs.empty() && !valid_name(n->name))
                    throw GrammarError("bad symbol '" + n->name + "'");
                std::string inst = instance_name(n->name, n->subs, env);
                touch_var(inst);
                out.add(1.0, inst);
                return out;
            }
            case Node::Add: {
                out = eval(n->a.get(), env);
                LinearExpr rhs = eval(n->b.get(), env);
                for (auto& t : rhs.terms) out.terms.push_back(t);
                out.constant += rhs.constant;
                return out;
            }
            case Node::Sub: {
                out = eval(n->a.get(), env);
                LinearExpr rhs = eval(n->b.get(), env);
                for (auto& t : rhs.terms) out.add(-t.coeff, t.var);
                out.constant -= rhs.constant;
                return out;
            }
            case Node::Neg: {
                LinearExpr inner = eval(n->a.get(), env);
                for (auto& t : inner.terms) out.add(-t.coeff, t.var);
                out.constant = -inner.constant;
                return out;
            }
            case Node::Mul: {
                LinearExpr lhs = eval(n->a.get(), env);
                LinearExpr rhs = eval(n->b.get(), env);
                if (!lhs.terms.empty() && !rhs.terms.empty()) {
                    // Most often one factor was meant to be a parameter that is
                    // missing from the retrieved data.
                    for (const Node* f : {n->a.get(), n->b.get()})
                        if (f->kind == Node::Sym && !data.has_param(f->name))
                            throw GrammarError("unbound symbol '" + f->name +
                                               "': not present in retrieved information");
                    throw GrammarError("nonlinear product of decision variables");
                }
                const LinearExpr& lin = lhs.terms.empty() ? rhs : lhs;
                double k = lhs.terms.empty() ? lhs.constant : rhs.constant;
                for (const auto& t : lin.terms) out.add(k * t.coeff, t.var);
                out.constant = k * lin.constant;
                return out;
            }
            case Node::SumNode: {
                auto [lo, hi] = resolve_set(n->binder.set, {n->a.get()}, n->binder.var);
                if (env.count(n->binder.var))
                    throw GrammarError("index '" + n->binder.var + "' rebound in nested sum");
                for (long k = lo; k <= hi; ++k) {
                    env[n->binder.var] = k;
                    LinearExpr part = eval(n->a.get(), env);
                    for (auto& t : part.terms) out.terms.push_back(t);
                    out.constant += part.constant;
                }
                env.erase(n->binder.var);
                out.normalize();
                return out;
            }
        }
        throw GrammarError("internal: unreachable node kind");
    }
};

struct ParsedLine {
    NodeP lhs, rhs;
    Tok::Kind rel = Tok::End;
    std::vector<Binder> binders;
    // domain form: lhs symbol + kind below when domain_line
    bool domain_line = false;
    VarKind domain_kind = VarKind::Continuous;
    double domain_lower = 0.0;
};

// Parses a constraint/domain line:
//   expr (<=|>=|=) expr [, forall binder {, binder}]
//   sym in Z+|Z|R+|R|{0,1} [, forall ...]
ParsedLine parse_constraint_line(const std::string& line) {
    auto toks = lex(line);
    ExprParser p{toks};
    ParsedLine out;
    out.lhs = p.parse_expr();

    auto parse_binders = [&]() {
        // expects: [Comma] (forall | for all) binder {, binder}
        if (p.cur().kind == Tok::Comma) ++p.i;
        if (p.cur().kind == Tok::Name && p.cur().subscript.empty() &&
            (p.cur().text == "forall" ||
             (p.cur().text == "for" && toks[p.i + 1].kind == Tok::Name &&
              toks[p.i + 1].text == "all"))) {
            p.i += p.cur().text == "for" ? 2 : 1;
        } else if (p.cur().kind != Tok::End) {
            throw GrammarError("expected 'forall' in '" + line + "'");
        }
        while (p.cur().kind != Tok::End) {
            if (p.cur().kind != Tok::Name || !p.cur().subscript.empty())
                throw GrammarError("bad binder in '" + line + "'");
            Binder b;
            b.var = p.cur().text;
            ++p.i;
            if (p.cur().kind == Tok::Name && p.cur().text == "in" && p.cur().subscript.empty()) {
                ++p.i;
                if (p.cur().kind == Tok::Name) {
                    b.set.kind = SetSpec::Named;
                    b.set.name = p.cur().text;
                    ++p.i;
                } else if (p.cur().kind == Tok::Number && toks[p.i + 1].kind == Tok::DotDot &&
                           toks[p.i + 2].kind == Tok::Number) {
                    b.set.kind = SetSpec::Range;
                    b.set.lo = (long)p.cur().value;
                    b.set.hi = (long)toks[p.i + 2].value;
                    p.i += 3;
                } else {
                    throw GrammarError("bad binder set in '" + line + "'");
                }
            }
            out.binders.push_back(b);
            if (p.cur().kind == Tok::Comma) {
                ++p.i;
                continue;
            }
            break;
        }
        if (p.cur().kind != Tok::End) throw GrammarError("trailing tokens in '" + line + "'");
    };

    // domain form?
    if (p.cur().kind == Tok::Name && p.cur().text == "in" && p.cur().subscript.empty()) {
        ++p.i;
        out.domain_line = true;
        if (p.cur().kind == Tok::LBrace) {
            // {0,1}
            if (!(toks[p.i + 1].kind == Tok::Number && toks[p.i + 1].value == 0.0 &&
                  toks[p.i + 2].kind == Tok::Comma && toks[p.i + 3].kind == Tok::Number &&
                  toks[p.i + 3].value == 1.0 && toks[p.i + 4].kind == Tok::RBrace))
                throw GrammarError("unsupported domain in '" + line + "'");
            p.i += 5;
            out.domain_kind = VarKind::Binary;
        } else if (p.cur().kind == Tok::Name) {
            std::string d = p.cur().text;
            ++p.i;
            bool plus = p.cur().kind == Tok::Plus;
            if (plus) ++p.i;
            if (d == "Z")
                out.domain_kind = VarKind::Integer;
            else if (d == "R")
                out.domain_kind = VarKind::Continuous;
            else
                throw GrammarError("unsupported domain '" + d + "' in '" + line + "'");
            out.domain_lower = plus ? 0.0 : -kInf;
        } else {
            throw GrammarError("unsupported domain in '" + line + "'");
        }
        if (p.cur().kind != Tok::End) parse_binders();
        return out;
    }

    if (p.cur().kind != Tok::Le && p.cur().kind != Tok::Ge && p.cur().kind != Tok::Eq)
        throw GrammarError("expected a relation in '" + line + "'");
    out.rel = p.cur().kind;
    ++p.i;
    out.rhs = p.parse_expr();
    if (p.cur().kind != Tok::End) parse_binders();
    return out;
}

// A title line like "1. Inventory Constraints:" — ends with ':' and has no relation.
bool is_group_title(const std::string& line) {
    if (line.empty() || line.back() != ':') return false;
    return line.find("<=") == std::string::npos && line.find(">=") == std::string::npos &&
           line.find('=') == std::string::npos;
}

}  // namespace

LinearModel parse_model_grammar(const std::string& text, const RetrievedData& extra) {
    // split into the three sections
    std::istringstream in(text);
    std::string raw;
    enum class Sec { None, Objective, Constraints, Retrieved } sec = Sec::None;
    std::string obj_text, retr_text;
    std::vector<std::string> cons_lines;
    bool saw_obj = false, saw_cons = false;
    while (std::getline(in, raw)) {
        std::string line = trim(raw);
        if (line == "Objective Function:") {
            sec = Sec::Objective;
            saw_obj = true;
            continue;
        }
        if (line == "Constraints:") {
            sec = Sec::Constraints;
            saw_cons = true;
            continue;
        }
        if (line == "Retrieved Information:") {
            sec = Sec::Retrieved;
            continue;
        }
        if (line.empty()) continue;
        switch (sec) {
            case Sec::None:
                throw GrammarError("text before the 'Objective Function:' header: " + line);
            case Sec::Objective: obj_text += (obj_text.empty() ? "" : " ") + line; break;
            case Sec::Constraints: cons_lines.push_back(line); break;
            case Sec::Retrieved: retr_text += line + "\n"; break;
        }
    }
    if (!saw_obj) throw GrammarError("missing 'Objective Function:' section");
    if (!saw_cons) throw GrammarError("missing 'Constraints:' section");

    ModelBuilder mb;
    mb.data = parse_retrieved(retr_text);
    mb.data.merge(extra);

    std::string obj = trim(obj_text);
    Objective sense;
    if (obj.rfind("max", 0) == 0) sense = Objective::Maximize;
    else if (obj.rfind("min", 0) == 0) sense = Objective::Minimize;
    else throw GrammarError("objective must start with 'max' or 'min'");
    size_t cut = obj.find(' ');
    std::string obj_expr_text = cut == std::string::npos ? "" : trim(obj.substr(cut));
    if (obj_expr_text.empty()) throw GrammarError("empty objective expression");
    mb.model.sense = sense;

    // constraints go first: the index ranges they pin down (via binders and
    // array lengths) are then available to the objective's sums
    int row_counter = 0;
    std::string current_group;
    for (const auto& line : cons_lines) {
        if (is_group_title(line)) {
            current_group = line;
            continue;
        }
        ParsedLine pl = parse_constraint_line(line);

        // expand binders into nested loops
        std::map<std::string, long> env;
        std::function<void(size_t)> expand = [&](size_t bi) {
            if (bi < pl.binders.size()) {
                const Binder& b = pl.binders[bi];
                auto [lo, hi] = mb.resolve_set(b.set, {pl.lhs.get(), pl.rhs.get()}, b.var);
                for (long k = lo; k <= hi; ++k) {
                    env[b.var] = k;
                    expand(bi + 1);
                }
                env.erase(b.var);
                return;
            }
            if (pl.domain_line) {
                if (pl.lhs->kind != Node::Sym)
                    throw GrammarError("domain line must name one variable: " + line);
                std::string inst = mb.instance_name(pl.lhs->name, pl.lhs->subs, env);
                int vi = mb.touch_var(inst);
                auto& v = mb.model.variables[vi];
                v.kind = pl.domain_kind;
                if (pl.domain_kind == VarKind::Binary) {
                    v.lower = 0.0;
                    v.upper = 1.0;
                } else {
                    v.lower = pl.domain_lower;
                }
                return;
            }
            LinearExpr lhs = mb.eval(pl.lhs.get(), env);
            LinearExpr rhs = mb.eval(pl.rhs.get(), env);
            // bare nonnegativity declarations set bounds instead of rows
            LinearExpr row = lhs;
            for (const auto& t : rhs.terms) row.add(-t.coeff, t.var);
            double rhs_const = rhs.constant - lhs.constant;
            row.constant = 0.0;
            row.normalize();
            if (pl.rel == Tok::Ge && rhs_const == 0.0 && row.terms.size() == 1 &&
                row.terms[0].coeff == 1.0) {
                auto& v = mb.model.variables[mb.touch_var(row.terms[0].var)];
                v.lower = std::max(v.lower, 0.0);
                return;
            }
            if (row.terms.empty()) {
                bool ok = pl.rel == Tok::Le   ? 0.0 <= rhs_const + 1e-9
                          : pl.rel == Tok::Ge ? 0.0 >= rhs_const - 1e-9
                                              : std::fabs(rhs_const) <= 1e-9;
                if (!ok)
                    throw GrammarError("constraint reduces to an unsatisfiable constant: " + line);
                return;
            }
            Constraint c;
            c.name = "r" + std::to_string(++row_counter);
            c.expr = std::move(row);
            c.rhs = rhs_const;
            c.sense = pl.rel == Tok::Le ? Sense::Le : pl.rel == Tok::Ge ? Sense::Ge : Sense::Eq;
            mb.model.constraints.push_back(std::move(c));
        };
        expand(0);
    }

    // objective
    {
        auto toks = lex(obj_expr_text);
        ExprParser p{toks};
        NodeP root = p.parse_expr();
        if (p.cur().kind != Tok::End)
            throw GrammarError("trailing tokens in the objective: " + obj_expr_text);
        std::map<std::string, long> env;
        mb.model.objective = mb.eval(root.get(), env);
        mb.model.objective.normalize();
    }

    auto defects = validate(mb.model);
    if (!defects.empty())
        throw GrammarError("parsed model is invalid: " + defects.front().where + ": " +
                           defects.front().message);
    return mb.model;
}

}  // namespace leanopt
