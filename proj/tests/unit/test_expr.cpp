#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "error.hpp"
#include "expr.hpp"

using namespace degenkit;

namespace {
const VarSet kAll = VarSet::of("tsuv");

double at(const Expr& e, double t, double s, double u, double v) {
    return eval_expr(e, {{"t", t}, {"s", s}, {"u", u}, {"v", v}});
}
}  // namespace

TEST_CASE("parse shapes") {
    const Expr e = parse_expr("sin(u - v)", kAll);
    CHECK(e.op() == Op::Sin);
    CHECK(e.arg(0).op() == Op::Sub);
    CHECK(parse_expr("t*v", VarSet::of("tsv")).op() == Op::Mul);
}

TEST_CASE("undeclared variable names the variable") {
    try {
        parse_expr("sin(x)", VarSet::of("tu"));
        FAIL("expected a parse error");
    } catch (const Error& err) {
        CHECK(std::string(err.what()).find("'x'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("v + 1", VarSet::of("tu")), Error);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        parse_expr("u + * v", kAll);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 4);
    }
    CHECK_THROWS_AS(parse_expr("sin(u", kAll), ParseError);
    CHECK_THROWS_AS(parse_expr("", kAll), ParseError);
    CHECK_THROWS_AS(parse_expr("u v", kAll), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(u)", kAll), Error);
}

TEST_CASE("precedence and associativity") {
    CHECK(at(parse_expr("2^3^2", kAll), 0, 0, 0, 0) == 512.0);  // ^ groups to the right
    CHECK(at(parse_expr("-2^2", kAll), 0, 0, 0, 0) == -4.0);   // pow binds tighter than minus
    CHECK(at(parse_expr("1 - 2 - 3", kAll), 0, 0, 0, 0) == -4.0);
    CHECK(at(parse_expr("8 / 4 / 2", kAll), 0, 0, 0, 0) == 1.0);
    CHECK(at(parse_expr("1 + 2*3", kAll), 0, 0, 0, 0) == 7.0);
    CHECK(at(parse_expr("pow(2, 10)", kAll), 0, 0, 0, 0) == 1024.0);
    CHECK(at(parse_expr("pi", kAll), 0, 0, 0, 0) == doctest::Approx(M_PI));
}

TEST_CASE("evaluation examples") {
    const Expr k = parse_expr("sin(u - v)", kAll);
    CHECK(at(k, 0, 0, 3.7, 3.7) == 0.0);
    CHECK(at(parse_expr("t*v", kAll), 0.5, 0, 0, 2) == 1.0);
    CHECK_THROWS_AS(at(parse_expr("1/(t - t)", kAll), 0.3, 0, 0, 0), Error);
    CHECK_THROWS_AS(at(parse_expr("u^0.5", kAll), 0, 0, -1, 0), Error);
    CHECK_THROWS_AS(at(parse_expr("u^(-1)", kAll), 0, 0, 0, 0), Error);
    CHECK(at(parse_expr("u^2", kAll), 0, 0, 0, 0) == 0.0);
    CHECK(at(parse_expr("abs(v)^1.5", kAll), 0, 0, 0, -4) == 8.0);
    CHECK(std::isinf(at(parse_expr("exp(u)", kAll), 0, 0, 1000, 0)));  // overflow saturates, NaN never appears
    CHECK_THROWS_AS(at(parse_expr("exp(u) - exp(u)", kAll), 0, 0, 1000, 0), Error);
    CHECK_THROWS_AS(eval_expr(k, {{"u", 1.0}}), Error);
}

TEST_CASE("compiled evaluation matches the tree and is repeatable") {
    const Expr e = parse_expr("exp(-t*u^2) + sin(s*v)/(1 + u^2)", kAll);
    const CompiledExpr c(e);
    for (double x : {0.1, 0.7, 1.9}) {
        const std::array<double, kVarCount> vars{x, 1 - x, 2 * x, x * x};
        const double a = c(vars);
        CHECK(a == c(vars));
        CHECK(a == at(e, vars[0], vars[1], vars[2], vars[3]));
    }
}

TEST_CASE("derivative examples") {
    const Expr dk = diff_expr(parse_expr("sin(u - v)", kAll), Var::v);
    for (double u : {0.0, 0.4, 2.0}) {
        for (double v : {-1.0, 0.3}) CHECK(at(dk, 0, 0, u, v) == doctest::Approx(-std::cos(u - v)).epsilon(1e-15));
    }
    const Expr tv = diff_expr(parse_expr("t*v", kAll), Var::v);
    CHECK(tv.structurally_equal(Expr::variable(Var::t)));
    CHECK(at(diff_expr(parse_expr("v^3", kAll), Var::v), 0, 0, 0, 2) == 12.0);
    CHECK(diff_expr(parse_expr("sin(t)", kAll), Var::u).is_constant(0.0));
}

TEST_CASE("abs blocks differentiation only in its own variable") {
    const Expr e = parse_expr("abs(t - 0.5)*v", kAll);
    CHECK_THROWS_AS(diff_expr(e, Var::t), Error);
    CHECK(at(diff_expr(e, Var::v), 0.25, 0, 0, 0) == 0.25);
}

TEST_CASE("variable exponents differentiate through log") {
    const Expr e = parse_expr("u^v", kAll);
    const Expr du = diff_expr(e, Var::u);
    const Expr dv = diff_expr(e, Var::v);
    CHECK(at(du, 0, 0, 2, 3) == doctest::Approx(12.0));
    CHECK(at(dv, 0, 0, 2, 3) == doctest::Approx(8.0 * std::log(2.0)));
}

TEST_CASE("print and reparse") {
    for (const char* text : {"sin(u - v)", "-u^2", "(u - 1)^(-2)", "2 - (3 - u)", "u/(v/t)", "-(-u)", "1e-3*u",
                             "exp(cos(v))*abs(s - t)", "0.1 + 0.2", "log(2 + u)"}) {
        const Expr e = parse_expr(text, kAll);
        const std::string p = e.to_string();
        const Expr again = parse_expr(p, kAll);
        CHECK_MESSAGE(again.structurally_equal(e), text << " printed as " << p);
        CHECK(again.to_string() == p);
    }
}

TEST_CASE("constant folding") {
    CHECK(parse_expr("2*3 + 1", kAll).is_constant(7.0));
    CHECK(parse_expr("0*u + v", kAll).structurally_equal(Expr::variable(Var::v)));
}
