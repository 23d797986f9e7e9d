#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "leanopt/canonical.hpp"
#include "leanopt/lp_format.hpp"

using namespace leanopt;

namespace {

LinearModel sample_model() {
    LinearModel m;
    m.sense = Objective::Maximize;
    m.variables.push_back({"x1", 0.0, 40.0, VarKind::Continuous});
    m.variables.push_back({"x2", -kInf, kInf, VarKind::Continuous});
    m.variables.push_back({"x3", 2.0, kInf, VarKind::Integer});
    m.variables.push_back({"b", 0.0, 1.0, VarKind::Binary});
    m.objective.add(1.0, "x1").add(2.0, "x2").add(3.0, "x3").add(0.5, "b");
    Constraint c1;
    c1.name = "c1";
    c1.expr.add(-1.0, "x1").add(1.0, "x2").add(1.0, "x3");
    c1.sense = Sense::Le;
    c1.rhs = 20.0;
    Constraint c2;
    c2.name = "c2";
    c2.expr.add(1.0, "x1").add(-3.0, "x2").add(1.0, "x3");
    c2.sense = Sense::Ge;
    c2.rhs = -30.0;
    Constraint c3;
    c3.name = "balance";
    c3.expr.add(1.0, "x2").add(-3.5, "x3").add(2.0, "b");
    c3.sense = Sense::Eq;
    c3.rhs = 0.0;
    m.constraints = {c1, c2, c3};
    return m;
}

LinearModel random_model(std::mt19937& rng) {
    std::uniform_int_distribution<int> nvars(1, 5), nrows(1, 5), coef(-4, 4), kind(0, 2);
    std::uniform_int_distribution<int> bnd(0, 3);
    LinearModel m;
    m.sense = rng() % 2 ? Objective::Maximize : Objective::Minimize;
    int n = nvars(rng);
    for (int i = 0; i < n; ++i) {
        Variable v;
        v.name = "v" + std::to_string(i);
        int k = kind(rng);
        v.kind = k == 0 ? VarKind::Continuous : (k == 1 ? VarKind::Integer : VarKind::Binary);
        if (v.kind == VarKind::Binary) {
            v.lower = 0;
            v.upper = 1;
        } else {
            switch (bnd(rng)) {
                case 0: v.lower = 0; v.upper = kInf; break;
                case 1: v.lower = -kInf; v.upper = kInf; break;
                case 2: v.lower = coef(rng); v.upper = v.lower + 1 + std::abs(coef(rng)); break;
                default: v.lower = -kInf; v.upper = coef(rng); break;
            }
        }
        m.variables.push_back(v);
    }
    for (int i = 0; i < n; ++i)
        if (int c = coef(rng); c != 0) m.objective.add(c, "v" + std::to_string(i));
    int rows = nrows(rng);
    for (int r = 0; r < rows; ++r) {
        Constraint c;
        bool nonempty = false;
        for (int i = 0; i < n; ++i)
            if (int cf = coef(rng); cf != 0) {
                c.expr.add(cf, "v" + std::to_string(i));
                nonempty = true;
            }
        if (!nonempty) c.expr.add(1.0, "v0");
        int s = rng() % 3;
        c.sense = s == 0 ? Sense::Le : (s == 1 ? Sense::Ge : Sense::Eq);
        c.rhs = coef(rng);
        m.constraints.push_back(c);
    }
    return m;
}

}  // namespace

TEST_CASE("write then read preserves model equivalence") {
    LinearModel m = sample_model();
    LinearModel back = read_lp(write_lp(m));
    auto res = models_equivalent(m, back);
    CHECK(res.equivalent);
}

TEST_CASE("round-trip is stable: second write equals first") {
    LinearModel m = sample_model();
    std::string once = write_lp(m);
    std::string twice = write_lp(read_lp(once));
    CHECK(once == twice);
}

TEST_CASE("randomized round-trip equivalence") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        LinearModel m = random_model(rng);
        if (!validate(m).empty()) continue;
        CAPTURE(trial);
        LinearModel back = read_lp(write_lp(m));
        CHECK(models_equivalent(m, back).equivalent);
    }
}

TEST_CASE("reader accepts CPLEX-style text with comments and keyword variants") {
    std::string text = R"(\ demo problem
Minimize
 cost: 2 x + 3 y - z
Such That
 r1: x + y >= 10
 r2: x - 2 y + z = 4
Bounds
 0 <= x <= 8
 y >= 1
 z free
Integers
 y
End
)";
    LinearModel m = read_lp(text);
    CHECK(m.sense == Objective::Minimize);
    REQUIRE(m.variables.size() == 3);
    CHECK(m.find_variable("x")->upper == doctest::Approx(8.0));
    CHECK(m.find_variable("y")->lower == doctest::Approx(1.0));
    CHECK(m.find_variable("y")->kind == VarKind::Integer);
    CHECK(m.find_variable("z")->lower == -kInf);
    REQUIRE(m.constraints.size() == 2);
    CHECK(m.constraints[0].sense == Sense::Ge);
    CHECK(m.constraints[1].sense == Sense::Eq);
}

TEST_CASE("binary section clamps bounds and sets kind") {
    std::string text = "Maximize\n obj: y\nSubject To\n c: y <= 5\nBinaries\n y\nEnd\n";
    LinearModel m = read_lp(text);
    CHECK(m.find_variable("y")->kind == VarKind::Binary);
    CHECK(m.find_variable("y")->upper == doctest::Approx(1.0));
}

TEST_CASE("parse errors carry a line number") {
    CHECK_THROWS_AS(read_lp(""), LpParseError);
    CHECK_THROWS_AS(read_lp("Maximize\n obj: x +\nEnd\n"), LpParseError);
    try {
        read_lp("Maximize\n obj: x\nSubject To\n c: x ??? 3\nEnd\n");
        FAIL("expected a parse error");
    } catch (const LpParseError& e) {
        CHECK(e.line >= 1);
    }
}

TEST_CASE("reader rejects models that fail validation") {
    // inverted bounds
    std::string text = "Maximize\n obj: x\nSubject To\n c: x <= 1\nBounds\n 5 <= x <= 2\nEnd\n";
    CHECK_THROWS(read_lp(text));
}

TEST_CASE("anonymous constraints get generated names") {
    std::string text = "Maximize\n x\nSubject To\n x <= 3\n x >= 1\nEnd\n";
    LinearModel m = read_lp(text);
    REQUIRE(m.constraints.size() == 2);
    CHECK(m.constraints[0].name != m.constraints[1].name);
    CHECK_FALSE(m.constraints[0].name.empty());
}

TEST_CASE("objective constant survives a round trip") {
    std::string text = "Minimize\n obj: 2 x + 10\nSubject To\n c: x >= 3\nEnd\n";
    LinearModel m = read_lp(text);
    CHECK(m.objective.constant == doctest::Approx(10.0));
    LinearModel back = read_lp(write_lp(m));
    CHECK(back.objective.constant == doctest::Approx(10.0));
}
