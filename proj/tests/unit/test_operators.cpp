#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "funcspace.hpp"
#include "grid.hpp"
#include "operators.hpp"

using namespace degenkit;

namespace {

constexpr double kPi = std::numbers::pi;

IntegralOperator kuramoto(const GridPtr& g) { return IntegralOperator(KernelSpec::parse("", "", "sin(u - v)"), g); }

void check_close(const GridFunction& a, const GridFunction& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

}  // namespace

TEST_CASE("kernel slots are typed") {
    CHECK_THROWS_AS(KernelSpec::parse("v", "", ""), Error);
    CHECK_THROWS_AS(KernelSpec::parse("", "u", ""), Error);
    CHECK_THROWS_AS(KernelSpec::parse("", "", "sin(x)"), Error);
    CHECK(KernelSpec::parse("", "", "").empty());
    CHECK_THROWS_AS(IntegralOperator(KernelSpec::parse("", "", ""), Grid::uniform(2)), Error);
}

TEST_CASE("superposition square") {
    const GridPtr g = Grid::uniform(4);
    const IntegralOperator op(KernelSpec::parse("u^2", "", ""), g);
    const GridFunction f = op.eval_f(GridFunction::sample(g, [](double t) { return t; }));
    const double expect[] = {0.015625, 0.140625, 0.390625, 0.765625};
    for (std::size_t i = 0; i < 4; ++i) CHECK(f[i] == expect[i]);
}

TEST_CASE("kuramoto evaluations") {
    const GridPtr g = Grid::uniform(10);
    check_close(kuramoto(g).eval_f(GridFunction::constant(g, 3.7)), GridFunction::zero(g), 0.0);
    for (std::size_t m : {1u, 3u, 8u}) {
        const GridPtr h = Grid::uniform(2 * m);
        const GridFunction x = GridFunction::sample(h, [](double t) { return t < 0.5 ? kPi / 2 : 0.0; });
        const GridFunction f = kuramoto(h).eval_f(x);
        for (std::size_t i = 0; i < h->size(); ++i) CHECK(f[i] == doctest::Approx(i < m ? 0.5 : -0.5).epsilon(1e-14));
    }
}

TEST_CASE("urysohn and mixed terms") {
    const GridPtr g = Grid::uniform(4);
    const IntegralOperator op(KernelSpec::parse("t", "s*v", "u*v"), g);
    const GridFunction x1 = GridFunction::constant(g, 2.0);
    const GridFunction x2 = GridFunction::sample(g, [](double t) { return t; });
    const GridFunction y = op.eval_g(x1, x2);
    // t_i + sum_j w_j t_j^2 + 2 sum_j w_j t_j
    double s2 = 0.0, s1 = 0.0;
    for (const Cell& c : g->cells()) {
        s2 += c.measure * c.representative * c.representative;
        s1 += c.measure * c.representative;
    }
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(g->cell(i).representative + s2 + 2 * s1));
}

TEST_CASE("kernel failures report the cell pair") {
    const GridPtr g = Grid::uniform(3);
    const IntegralOperator op(KernelSpec::parse("", "", "1/(u - v)"), g);
    try {
        op.eval_f(GridFunction::constant(g, 1.0));
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("(0, 0)") != std::string::npos);
    }
    CHECK_THROWS_AS(op.eval_f(GridFunction::constant(Grid::uniform(3), 1.0)), Error);
}

TEST_CASE("d2g examples") {
    const GridPtr g = Grid::uniform(8);
    const GridFunction zero = GridFunction::zero(g);
    const LinearOp m = kuramoto(g).d2g_matrix(zero, zero);
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) CHECK(m.entry(i, j) == -g->cell(j).measure);
        CHECK(m.diagonal(i) == 0.0);
    }
    check_close(m.apply(GridFunction::constant(g, 1.0)), GridFunction::constant(g, -1.0), 1e-15);

    const IntegralOperator sq(KernelSpec::parse("", "", "v^2"), g);
    const GridFunction one = GridFunction::constant(g, 1.0);
    check_close(sq.d2g_matrix(zero, one).apply(one), GridFunction::constant(g, 2.0), 1e-15);

    const IntegralOperator bad(KernelSpec::parse("", "", "abs(v)"), g);
    CHECK_THROWS_AS(bad.d2g_matrix(one, one), Error);
    CHECK_NOTHROW(bad.eval_f(one));
}

TEST_CASE("d2g against finite differences") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    const GridPtr g = Grid::uniform(32);
    for (int k = 0; k < 5; ++k) {
        const std::string k1 = std::to_string(c(rng)) + "*exp(-v^2*s)";
        const std::string k2 = std::to_string(c(rng)) + "*cos(u + 2*v - t*s)";
        const IntegralOperator op(KernelSpec::parse("", k1, k2), g);
        const GridFunction x1 = GridFunction::sample(g, [](double t) { return std::sin(4 * t); });
        const GridFunction x2 = GridFunction::sample(g, [&](double t) { return t - 0.3 * k; });
        const GridFunction h = GridFunction::sample(g, [](double t) { return 1 - t * t; });
        const double eps = 1e-4;
        const GridFunction fd = (op.eval_g(x1, x2 + h * eps) - op.eval_g(x1, x2 - h * eps)) * (0.5 / eps);
        const GridFunction mh = op.d2g_matrix(x1, x2).apply(h);
        CHECK(distance(fd, mh, NormSpec::lp(2)) <= 1e-6 * norm(mh, NormSpec::lp(2)));
    }
}

TEST_CASE("gateaux derivative examples") {
    const GridPtr g = Grid::uniform(16);
    const LinearOp L = kuramoto(g).gateaux_f_matrix(GridFunction::zero(g));
    check_close(L.apply(GridFunction::constant(g, 1.0)), GridFunction::zero(g), 1e-15);
    const GridFunction chi = GridFunction::sample(g, [](double t) { return t < 0.5 ? 1.0 : 0.0; });
    check_close(L.apply(chi), GridFunction::sample(g, [](double t) { return t < 0.5 ? 0.5 : -0.5; }), 1e-15);

    const IntegralOperator affine(KernelSpec::parse("2*u", "", ""), g);
    const LinearOp A = affine.gateaux_f_matrix(GridFunction::constant(g, 0.7));
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(A.diagonal(i) == 2.0);
        for (std::size_t j = 0; j < g->size(); ++j) CHECK(A.entry(i, j) == 0.0);
    }
}

TEST_CASE("gateaux derivative against finite differences") {
    const GridPtr g = Grid::uniform(24);
    const IntegralOperator op(KernelSpec::parse("sin(u)*t", "v^3*s", "exp(-(u - v)^2)*t"), g);
    const GridFunction x0 = GridFunction::sample(g, [](double t) { return std::cos(3 * t); });
    const GridFunction h = GridFunction::sample(g, [](double t) { return t < 0.4 ? 1.0 : -t; });
    const double eps = 1e-5;
    const GridFunction fd = (op.eval_f(x0 + h * eps) - op.eval_f(x0 - h * eps)) * (0.5 / eps);
    CHECK(distance(fd, op.gateaux_f_matrix(x0).apply(h), NormSpec::lp(2)) <= 1e-8);
}

TEST_CASE("frechet candidate") {
    const GridPtr g = Grid::uniform(8);
    const LinearOp d1 = kuramoto(g).frechet_candidate_d1g(GridFunction::zero(g));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(d1.diagonal(i) == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(d1.entry(i, j)) <= 1e-15);
    }
    const IntegralOperator affine(KernelSpec::parse("3*u + t", "2*v", ""), g);
    const LinearOp a = affine.frechet_candidate_d1g(GridFunction::constant(g, 1.0));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(a.diagonal(i) == 3.0);
        for (std::size_t j = 0; j < 8; ++j) CHECK(a.entry(i, j) == 0.0);
    }
    const IntegralOperator none(KernelSpec::parse("0", "", ""), g);
    const LinearOp z = none.frechet_candidate_d1g(GridFunction::constant(g, 1.0));
    for (double v : z.dense()) CHECK(v == 0.0);
}

TEST_CASE("linear operators are linear") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    const GridPtr g = Grid::uniform(20);
    const IntegralOperator op(KernelSpec::parse("u^3", "cos(v*t)", "sin(u*v + s)"), g);
    const GridFunction x0 = GridFunction::sample(g, [](double t) { return t * t; });
    for (const LinearOp& L : {op.gateaux_f_matrix(x0), op.d2g_matrix(x0, x0), op.frechet_candidate_d1g(x0)}) {
        std::vector<double> a(20), b(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a[i] = n(rng);
            b[i] = n(rng);
        }
        const GridFunction x = GridFunction::scalar(g, a), y = GridFunction::scalar(g, b);
        const GridFunction lhs = L.apply(x * 1.7 + y * -0.4);
        const GridFunction rhs = L.apply(x) * 1.7 + L.apply(y) * -0.4;
        check_close(lhs, rhs, 1e-12);
    }
    CHECK_THROWS_AS(LinearOp(g, std::vector<double>(400, NAN), std::vector<double>(20, 0.0)), Error);
}

TEST_CASE("G is locally determined in its first slot") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    const GridPtr g = Grid::uniform(16);
    const IntegralOperator op(KernelSpec::parse("u^2", "sin(v)", "cos(u - v)*t"), g);
    const GridFunction x2 = GridFunction::sample(g, [](double t) { return std::exp(t); });
    for (int k = 0; k < 10; ++k) {
        std::vector<double> a(16), b(16);
        std::vector<std::uint8_t> flags(16);
        for (std::size_t i = 0; i < 16; ++i) {
            flags[i] = static_cast<std::uint8_t>(rng() & 1U);
            a[i] = n(rng);
            b[i] = flags[i] ? a[i] : n(rng);
        }
        const GridFunction ya = op.eval_g(GridFunction::scalar(g, a), x2);
        const GridFunction yb = op.eval_g(GridFunction::scalar(g, b), x2);
        for (std::size_t i = 0; i < 16; ++i) {
            if (flags[i]) CHECK(ya[i] == yb[i]);
        }
    }
}

TEST_CASE("refinement consistency of G") {
    const IntegralOperator base(KernelSpec::parse("sin(u)", "v^2*s", "cos(u - v)*t"), Grid::uniform(1));
    auto x = [](double t) { return std::sin(3 * t) + t; };
    std::vector<double> logn, logd;
    for (std::size_t n = 16; n <= 512; n *= 2) {
        const GridPtr coarse = Grid::uniform(n);
        const Refinement r = refine(coarse);
        const GridFunction yc = base.rebind(coarse).eval_f(GridFunction::sample(coarse, x));
        const GridFunction yf = base.rebind(r.fine).eval_f(GridFunction::sample(r.fine, x));
        logn.push_back(std::log(static_cast<double>(n)));
        logd.push_back(std::log(distance(yc.transport(r), yf, NormSpec::lp(2))));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
        mx += logn[i] / logn.size();
        my += logd[i] / logd.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
        sxy += (logn[i] - mx) * (logd[i] - my);
        sxx += (logn[i] - mx) * (logn[i] - mx);
    }
    CHECK(-sxy / sxx >= 0.9);
}
