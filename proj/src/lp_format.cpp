#include "leanopt/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace leanopt {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void append_expr(std::string& out, const LinearExpr& expr) {
    bool first = true;
    for (const auto& t : expr.terms) {
        double c = t.coeff;
        if (first) {
            if (c < 0) out += "- ";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        double mag = std::fabs(c);
        if (mag != 1.0) out += fmt(mag) + " ";
        out += t.var;
    }
    if (expr.constant != 0.0 || expr.terms.empty()) {
        if (!first) out += expr.constant < 0 ? " - " : " + ";
        else if (expr.constant < 0) out += "- ";
        out += fmt(std::fabs(expr.constant));
    }
}

}  // namespace

std::string write_lp(const LinearModel& model) {
    require_valid(model);
    std::string out;
    out += model.sense == Objective::Maximize ? "Maximize\n" : "Minimize\n";
    out += " obj: ";
    append_expr(out, model.objective);
    out += "\nSubject To\n";
    int anon = 0;
    for (const auto& c : model.constraints) {
        std::string name = c.name.empty() ? "c" + std::to_string(++anon) : c.name;
        out += " " + name + ": ";
        append_expr(out, c.expr);
        switch (c.sense) {
            case Sense::Le: out += " <= "; break;
            case Sense::Ge: out += " >= "; break;
            case Sense::Eq: out += " = "; break;
        }
        out += fmt(c.rhs - c.expr.constant);
        out += "\n";
    }
    out += "Bounds\n";
    for (const auto& v : model.variables) {
        bool lb_inf = std::isinf(v.lower), ub_inf = std::isinf(v.upper);
        if (lb_inf && ub_inf)
            out += " " + v.name + " free\n";
        else if (lb_inf)
            out += " -inf <= " + v.name + " <= " + fmt(v.upper) + "\n";
        else if (ub_inf)
            out += " " + v.name + " >= " + fmt(v.lower) + "\n";
        else if (v.lower == v.upper)
            out += " " + v.name + " = " + fmt(v.lower) + "\n";
        else
            out += " " + fmt(v.lower) + " <= " + v.name + " <= " + fmt(v.upper) + "\n";
    }
    std::string generals, binaries;
    for (const auto& v : model.variables) {
        if (v.kind == VarKind::Integer) generals += " " + v.name + "\n";
        if (v.kind == VarKind::Binary) binaries += " " + v.name + "\n";
    }
    if (!generals.empty()) out += "Generals\n" + generals;
    if (!binaries.empty()) out += "Binaries\n" + binaries;
    out += "End\n";
    return out;
}

namespace {

struct Token {
    enum Kind { Word, Number, Plus, Minus, Le, Ge, Eq, Colon } kind;
    std::string text;
    double value = 0.0;
    int line = 0;
};

bool name_start(char c) {
    return std::isalpha((unsigned char)c) || c == '_';
}
bool name_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '.' || c == '[' || c == ']' ||
           c == '(' || c == ')' || c == '#' || c == '\'';
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == '\\') {  // comment to end of line
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (std::isspace((unsigned char)c)) {
            ++i;
        } else if (c == '<' || c == '>') {
            Token t{c == '<' ? Token::Le : Token::Ge, std::string(1, c), 0.0, line};
            ++i;
            if (i < text.size() && text[i] == '=') ++i;
            out.push_back(t);
        } else if (c == '=') {
            ++i;
            if (i < text.size() && (text[i] == '<' || text[i] == '>')) {
                out.push_back({text[i] == '<' ? Token::Le : Token::Ge, "=<", 0.0, line});
                ++i;
            } else {
                out.push_back({Token::Eq, "=", 0.0, line});
            }
        } else if (c == '+') {
            out.push_back({Token::Plus, "+", 0.0, line});
            ++i;
        } else if (c == '-') {
            out.push_back({Token::Minus, "-", 0.0, line});
            ++i;
        } else if (c == ':') {
            out.push_back({Token::Colon, ":", 0.0, line});
            ++i;
        } else if (std::isdigit((unsigned char)c) || c == '.') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isdigit((unsigned char)text[j]) || text[j] == '.' || text[j] == 'e' ||
                    text[j] == 'E' ||
                    ((text[j] == '+' || text[j] == '-') && j > i &&
                     (text[j - 1] == 'e' || text[j - 1] == 'E'))))
                ++j;
            std::string num = text.substr(i, j - i);
            try {
                out.push_back({Token::Number, num, std::stod(num), line});
            } catch (const std::exception&) {
                throw LpParseError("bad number '" + num + "'", line);
            }
            i = j;
        } else if (name_start(c)) {
            size_t j = i;
            while (j < text.size() && name_char(text[j])) ++j;
            out.push_back({Token::Word, text.substr(i, j - i), 0.0, line});
            i = j;
        } else {
            throw LpParseError(std::string("unexpected character '") + c + "'", line);
        }
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

enum class Section { Objective, Constraints, Bounds, Generals, Binaries, End };

bool section_keyword(const std::vector<Token>& toks, size_t& i, Section& sec, Objective& obj) {
    if (i >= toks.size() || toks[i].kind != Token::Word) return false;
    std::string w = lower(toks[i].text);
    if (w == "maximize" || w == "maximise" || w == "max") {
        obj = Objective::Maximize;
        sec = Section::Objective;
        ++i;
        return true;
    }
    if (w == "minimize" || w == "minimise" || w == "min") {
        obj = Objective::Minimize;
        sec = Section::Objective;
        ++i;
        return true;
    }
    if (w == "subject" || w == "such") {
        if (i + 1 < toks.size() && toks[i + 1].kind == Token::Word &&
            (lower(toks[i + 1].text) == "to" || lower(toks[i + 1].text) == "that")) {
            sec = Section::Constraints;
            i += 2;
            return true;
        }
        return false;
    }
    if (w == "st" || w == "s.t.") {
        sec = Section::Constraints;
        ++i;
        return true;
    }
    if (w == "bounds" || w == "bound") {
        sec = Section::Bounds;
        ++i;
        return true;
    }
    if (w == "generals" || w == "general" || w == "gen" || w == "integers" || w == "integer") {
        sec = Section::Generals;
        ++i;
        return true;
    }
    if (w == "binaries" || w == "binary" || w == "bin") {
        sec = Section::Binaries;
        ++i;
        return true;
    }
    if (w == "end") {
        sec = Section::End;
        ++i;
        return true;
    }
    return false;
}

struct Parser {
    const std::vector<Token>& toks;
    size_t i = 0;
    LinearModel model;
    std::map<std::string, int> var_index;

    int touch_var(const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        int idx = (int)model.variables.size();
        model.variables.push_back({name, 0.0, kInf, VarKind::Continuous});
        var_index[name] = idx;
        return idx;
    }

    // Parses a linear expression, stopping at a relational token or section keyword.
    LinearExpr parse_expr() {
        LinearExpr expr;
        double sign = 1.0;
        bool pending_sign = false;
        while (i < toks.size()) {
            const Token& t = toks[i];
            if (t.kind == Token::Le || t.kind == Token::Ge || t.kind == Token::Eq) break;
            {
                size_t save = i;
                Section sec;
                Objective obj;
                if (t.kind == Token::Word && section_keyword(toks, i, sec, obj)) {
                    i = save;
                    break;
                }
            }
            // a "name :" pair starts the next constraint
            if (t.kind == Token::Word && i + 1 < toks.size() && toks[i + 1].kind == Token::Colon)
                break;
            if (t.kind == Token::Plus) {
                pending_sign = true;
                sign = sign == 0 ? 1.0 : sign;
                ++i;
            } else if (t.kind == Token::Minus) {
                sign = -sign;
                pending_sign = true;
                ++i;
            } else if (t.kind == Token::Number) {
                double coeff = sign * t.value;
                ++i;
                if (i < toks.size() && toks[i].kind == Token::Word) {
                    // peek: a section keyword after a number ends the expression
                    size_t save = i;
                    Section sec;
                    Objective obj;
                    if (section_keyword(toks, i, sec, obj)) {
                        i = save;
                        expr.constant += coeff;
                    } else {
                        i = save;
                        expr.add(coeff, toks[i].text);
                        ++i;
                    }
                } else {
                    expr.constant += coeff;
                }
                sign = 1.0;
                pending_sign = false;
            } else if (t.kind == Token::Word) {
                // possible constraint name label "name:" — caller handles; here it is a variable
                expr.add(sign, t.text);
                ++i;
                sign = 1.0;
                pending_sign = false;
            } else if (t.kind == Token::Colon) {
                throw LpParseError("unexpected ':'", t.line);
            } else {
                break;
            }
        }
        if (pending_sign) throw LpParseError("dangling sign in expression",
                                             i < toks.size() ? toks[i].line : 0);
        for (const auto& term : expr.terms) touch_var(term.var);
        return expr;
    }
};

}  // namespace

LinearModel read_lp(const std::string& text) {
    auto toks = tokenize(text);
    if (toks.empty()) throw LpParseError("empty input", 1);
    Parser p{toks};
    Section sec;
    Objective obj_sense = Objective::Maximize;
    if (!section_keyword(toks, p.i, sec, obj_sense) || sec != Section::Objective)
        throw LpParseError("expected Maximize or Minimize", toks.front().line);
    p.model.sense = obj_sense;

    // objective, optionally labeled
    if (p.i + 1 < toks.size() && toks[p.i].kind == Token::Word &&
        toks[p.i + 1].kind == Token::Colon)
        p.i += 2;
    p.model.objective = p.parse_expr();

    bool saw_constraints = false;
    while (p.i < toks.size()) {
        size_t before = p.i;
        if (!section_keyword(toks, p.i, sec, obj_sense))
            throw LpParseError("expected a section keyword near '" + toks[p.i].text + "'",
                               toks[p.i].line);
        if (sec == Section::End) break;
        if (sec == Section::Constraints) {
            saw_constraints = true;
            while (p.i < toks.size()) {
                size_t save = p.i;
                Section peek;
                Objective dummy;
                if (section_keyword(toks, p.i, peek, dummy)) {
                    p.i = save;
                    break;
                }
                Constraint c;
                if (p.i + 1 < toks.size() && toks[p.i].kind == Token::Word &&
                    toks[p.i + 1].kind == Token::Colon) {
                    c.name = toks[p.i].text;
                    p.i += 2;
                }
                int line = p.i < toks.size() ? toks[p.i].line : 0;
                LinearExpr lhs = p.parse_expr();
                if (p.i >= toks.size()) throw LpParseError("missing relation", line);
                Token::Kind rel = toks[p.i].kind;
                if (rel != Token::Le && rel != Token::Ge && rel != Token::Eq)
                    throw LpParseError("expected <=, >= or =", toks[p.i].line);
                ++p.i;
                // right-hand side: a signed numeric constant
                double sign = 1.0;
                if (p.i < toks.size() && toks[p.i].kind == Token::Minus) {
                    sign = -1.0;
                    ++p.i;
                } else if (p.i < toks.size() && toks[p.i].kind == Token::Plus) {
                    ++p.i;
                }
                if (p.i >= toks.size() || toks[p.i].kind != Token::Number)
                    throw LpParseError("expected a constant right-hand side",
                                       p.i < toks.size() ? toks[p.i].line : line);
                double rhs_value = sign * toks[p.i++].value;
                c.expr = lhs;
                c.expr.constant = 0.0;
                c.rhs = rhs_value - lhs.constant;
                c.sense = rel == Token::Le ? Sense::Le : rel == Token::Ge ? Sense::Ge : Sense::Eq;
                c.expr.normalize();
                if (c.expr.terms.empty())
                    throw LpParseError("constraint without variables", line);
                if (c.name.empty())
                    c.name = "c" + std::to_string(p.model.constraints.size() + 1);
                p.model.constraints.push_back(std::move(c));
            }
        } else if (sec == Section::Bounds) {
            while (p.i < toks.size()) {
                size_t save = p.i;
                Section peek;
                Objective dummy;
                if (section_keyword(toks, p.i, peek, dummy)) {
                    p.i = save;
                    break;
                }
                int line = toks[p.i].line;
                auto read_value = [&]() -> double {
                    double sign = 1.0;
                    if (toks[p.i].kind == Token::Minus) {
                        sign = -1.0;
                        ++p.i;
                    } else if (toks[p.i].kind == Token::Plus) {
                        ++p.i;
                    }
                    if (p.i >= toks.size()) throw LpParseError("truncated bound", line);
                    if (toks[p.i].kind == Token::Number) return sign * toks[p.i++].value;
                    if (toks[p.i].kind == Token::Word &&
                        (lower(toks[p.i].text) == "inf" || lower(toks[p.i].text) == "infinity")) {
                        ++p.i;
                        return sign * kInf;
                    }
                    throw LpParseError("expected a number in bound", toks[p.i].line);
                };
                bool leading_value = toks[p.i].kind == Token::Number ||
                                     toks[p.i].kind == Token::Minus ||
                                     toks[p.i].kind == Token::Plus ||
                                     (toks[p.i].kind == Token::Word &&
                                      (lower(toks[p.i].text) == "inf" ||
                                       lower(toks[p.i].text) == "infinity"));
                if (leading_value) {
                    double lo = read_value();
                    if (p.i >= toks.size() || toks[p.i].kind != Token::Le)
                        throw LpParseError("expected <= in bound", line);
                    ++p.i;
                    if (p.i >= toks.size() || toks[p.i].kind != Token::Word)
                        throw LpParseError("expected variable in bound", line);
                    int vi = p.touch_var(toks[p.i].text);
                    ++p.i;
                    p.model.variables[vi].lower = lo;
                    if (p.i < toks.size() && toks[p.i].kind == Token::Le) {
                        ++p.i;
                        p.model.variables[vi].upper = read_value();
                    }
                } else if (toks[p.i].kind == Token::Word) {
                    std::string name = toks[p.i].text;
                    ++p.i;
                    if (p.i < toks.size() && toks[p.i].kind == Token::Word &&
                        lower(toks[p.i].text) == "free") {
                        int vi = p.touch_var(name);
                        p.model.variables[vi].lower = -kInf;
                        p.model.variables[vi].upper = kInf;
                        ++p.i;
                    } else if (p.i < toks.size()) {
                        Token::Kind rel = toks[p.i].kind;
                        if (rel != Token::Le && rel != Token::Ge && rel != Token::Eq)
                            throw LpParseError("malformed bound", line);
                        ++p.i;
                        double v = read_value();
                        int vi = p.touch_var(name);
                        if (rel == Token::Le) p.model.variables[vi].upper = v;
                        else if (rel == Token::Ge) p.model.variables[vi].lower = v;
                        else {
                            p.model.variables[vi].lower = v;
                            p.model.variables[vi].upper = v;
                        }
                    } else {
                        throw LpParseError("truncated bound", line);
                    }
                } else {
                    throw LpParseError("malformed bound", line);
                }
            }
        } else if (sec == Section::Generals || sec == Section::Binaries) {
            bool binary = sec == Section::Binaries;
            while (p.i < toks.size()) {
                size_t save = p.i;
                Section peek;
                Objective dummy;
                if (section_keyword(toks, p.i, peek, dummy)) {
                    p.i = save;
                    break;
                }
                if (toks[p.i].kind != Token::Word)
                    throw LpParseError("expected variable name", toks[p.i].line);
                int vi = p.touch_var(toks[p.i].text);
                auto& v = p.model.variables[vi];
                if (binary) {
                    v.kind = VarKind::Binary;
                    v.lower = std::max(v.lower, 0.0);
                    v.upper = std::min(v.upper, 1.0);
                } else {
                    v.kind = VarKind::Integer;
                }
                ++p.i;
            }
        } else {
            throw LpParseError("unexpected section", toks[before].line);
        }
    }
    (void)saw_constraints;
    auto defects = validate(p.model);
    if (!defects.empty())
        throw LpParseError("model invalid after parse: " + defects.front().where + ": " +
                               defects.front().message,
                           toks.back().line);
    return p.model;
}

}  // namespace leanopt
