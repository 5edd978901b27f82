// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "funcspace.hpp"
#include "grid.hpp"
#include "operators.hpp"
#include "probes.hpp"
#include "runner.hpp"

using namespace degenkit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool ok;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

KernelSpec kuramoto() { return KernelSpec::parse("", "", "sin(u - v)"); }

// 1 ----------------------------------------------------------------------
Outcome kuramoto_residual() {
    constexpr double kCurveTol = 1e-9;
    constexpr double kLimitTol = 1e-3;
    const GridPtr g = Grid::uniform(1024);
    const IntegralOperator op(kuramoto(), g);
    const NormSpec l2 = NormSpec::lp(2);
    const auto r = frechet_residual(op, GridFunction::zero(g), l2, l2, kPi / 2, 10);
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double expect = (1.0 - 2.0 / kPi) * std::sqrt(1.0 - std::ldexp(1.0, -n));
        worst = std::max(worst, std::abs(r.curve.value[n - 1] - expect));
    }
    const double limit_gap = std::abs(r.curve.value.back() - (1.0 - 2.0 / kPi));
    return {worst <= kCurveTol && limit_gap <= kLimitTol && r.verdict == Verdict::DegeneracyWitnessed,
            "max curve error " + fmt(worst) + ", |ratio_10 - (1-2/pi)| = " + fmt(limit_gap) + ", verdict " +
                to_string(r.verdict)};
}

// 2 ----------------------------------------------------------------------
Outcome affine_baseline() {
    constexpr double kTol = 1e-10;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    const GridPtr g = Grid::uniform(64);
    const NormSpec l2 = NormSpec::lp(2);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        std::ostringstream k0, k1, k2;
        k0.precision(17);
        k1.precision(17);
        k2.precision(17);
        k0 << c(rng) << "*u + " << c(rng) << "*t + " << c(rng);
        k1 << "(" << c(rng) << " + " << c(rng) << "*t*s)*v + " << c(rng) << "*s";
        k2 << c(rng) << "*u + " << c(rng) << "*cos(t - s)*v + " << c(rng) << "*t";
        const IntegralOperator op(KernelSpec::parse(k0.str(), k % 2 ? k1.str() : "", k % 3 ? k2.str() : ""), g);
        const double a0 = c(rng), a1 = c(rng);
        const GridFunction x0 = GridFunction::sample(g, [&](double t) { return a0 + a1 * t; });
        const auto r = frechet_residual(op, x0, l2, l2, 0.5 + std::abs(c(rng)), 12);
        for (double v : r.curve.value) worst = std::max(worst, v);
    }
    return {worst <= kTol, "max residual ratio over 10 affine specs " + fmt(worst)};
}

// 3 ----------------------------------------------------------------------
Outcome d2g_finite_differences() {
    constexpr double kTol = 1e-6;
    constexpr double kStep = 1e-4;
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> c(-1.5, 1.5);
    const GridPtr g = Grid::uniform(64);
    const NormSpec l2 = NormSpec::lp(2);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::ostringstream k1, k2;
        k1.precision(17);
        k2.precision(17);
        k1 << c(rng) << "*cos(v + " << c(rng) << "*s) + " << c(rng) << "*t*v^2";
        k2 << c(rng) << "*sin(" << c(rng) << "*u - " << c(rng) << "*v + t) + " << c(rng)
           << "*exp(-(v*s)^2)*u + " << c(rng) << "*u*v^3/(1 + t)";
        const IntegralOperator op(KernelSpec::parse("", k1.str(), k2.str()), g);
        const double p = c(rng), q = c(rng);
        const GridFunction x1 = GridFunction::sample(g, [&](double t) { return p * std::sin(3 * t) + q; });
        const GridFunction x2 = GridFunction::sample(g, [&](double t) { return q * t * t - p; });
        const GridFunction h = GridFunction::sample(g, [&](double t) { return std::cos(5 * t + p); });
        const GridFunction fd =
            (op.eval_g(x1, x2 + h * kStep) - op.eval_g(x1, x2 - h * kStep)) * (0.5 / kStep);
        const GridFunction mh = op.d2g_matrix(x1, x2).apply(h);
        worst = std::max(worst, distance(fd, mh, l2) / std::max(norm(mh, l2), 1e-300));
    }
    return {worst <= kTol, "max relative error over 20 kernels " + fmt(worst)};
}

// 4 ----------------------------------------------------------------------
Outcome mixture_nondegeneracy() {
    constexpr double kTol = 1e-12;
    constexpr double kPacking = 0.3;
    const GridPtr g = Grid::uniform(16);
    const auto pts = mixture_set(GridFunction::constant(g, 1.0), GridFunction::zero(g), MixtureMode{});
    const auto est = mnc_estimate(pts, NormSpec::lp(2), 50);
    const double u1 = est.upper_at(1), l1 = est.lower_at(1), l50 = est.lower_at(50);
    return {pts.size() == 65536 && std::abs(u1 - 0.5) <= kTol && std::abs(l1 - 0.5) <= kTol && l50 >= kPacking,
            std::to_string(pts.size()) + " mixtures, upper(1) " + fmt(u1) + ", lower(1) " + fmt(l1) +
                ", lower(50) " + fmt(l50)};
}

// 5 ----------------------------------------------------------------------
Outcome pointwise_lipschitz_transfer() {
    constexpr double kMargin = 0.02;
    const GridPtr g = Grid::uniform(64);
    const IntegralOperator op(KernelSpec::parse("sin(u)", "", ""), g);
    const NormSpec l2 = NormSpec::lp(2);
    const GridFunction x0 = GridFunction::zero(g);
    const double est = lipschitz_local(op, x0, 1.0, l2, l2, 1000, 5);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> val(-4.0, 4.0);
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> a(g->size()), b(g->size());
        const double scale = std::exp2(-(k % 8));
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = scale * val(rng);
            b[i] = a[i] + scale * 0.1 * val(rng);
        }
        const auto r = lipschitz_pointwise(op, GridFunction::scalar(g, a), GridFunction::scalar(g, b), x0,
                                           est + kMargin);
        worst = std::max(worst, r.max_excess);
    }
    return {worst <= 0.0, "L-hat " + fmt(est) + ", max excess over 100 pairs " + fmt(worst)};
}

// 6 ----------------------------------------------------------------------
Outcome lipschitz_violation() {
    const GridPtr g = Grid::uniform(8);
    const IntegralOperator op(KernelSpec::parse("u^2", "", ""), g);
    const auto r = lipschitz_pointwise(op, GridFunction::constant(g, 2.0), GridFunction::constant(g, 1.0),
                                       GridFunction::zero(g), 1.0);
    return {r.max_excess == 2.0, "max excess " + fmt(r.max_excess) + " at cell " + std::to_string(r.cell)};
}

// 7 ----------------------------------------------------------------------
Outcome luxemburg_norms() {
    constexpr double kRelTol = 1e-10;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    double worst = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
        std::ostringstream text;
        text << "u^" << p;
        const NormSpec orlicz = NormSpec::orlicz(YoungFunction::from_text(text.str()));
        const NormSpec lp = NormSpec::lp(p);
        for (int k = 0; k < 100; ++k) {
            const GridPtr g = Grid::uniform(8 + static_cast<std::size_t>(k % 5) * 13);
            std::vector<double> v(g->size());
            const double scale = std::exp2(static_cast<double>(k % 11) - 5.0);
            for (double& x : v) x = scale * val(rng);
            const GridFunction x = GridFunction::scalar(g, v);
            const double ref = norm(x, lp);
            worst = std::max(worst, std::abs(norm(x, orlicz) - ref) / ref);
        }
    }
    const NormSpec split = NormSpec::orlicz(YoungFunction::variable_exponent(
        [](double t) { return t <= 0.5 ? 2.0 : 4.0; }, "u^p(t), p = 2 | 4"));
    double worst_c = 0.0;
    const GridPtr g = Grid::uniform(64);
    for (double c : {0.25, 1.0, 2.0, 7.5}) {
        worst_c = std::max(worst_c, std::abs(norm(GridFunction::constant(g, c), split) - c));
    }
    return {worst <= kRelTol && worst_c <= 1e-10,
            "max relative error vs Lp " + fmt(worst) + ", variable exponent error " + fmt(worst_c)};
}

// 8 ----------------------------------------------------------------------
Outcome darbo_bound() {
    constexpr double kSlack = 0.05;
    constexpr double kGrowthTol = 1e-9;
    const GridPtr g = Grid::uniform(64);
    const IntegralOperator op(kuramoto(), g);
    const NormSpec l2 = NormSpec::lp(2);
    const auto r = darbo_growth(op, GridFunction::zero(g), l2, l2, {0.5, 0.25, 0.1, 0.05}, 240, 8, 1.0, kSlack);
    bool ok = r.growth_excess <= kGrowthTol;
    std::string lhs;
    for (double v : r.lhs.value) {
        ok = ok && v <= r.rhs + kSlack;
        lhs += (lhs.empty() ? "" : ", ") + fmt(v);
    }
    return {ok, "lhs [" + lhs + "], rhs " + fmt(r.rhs) + ", growth excess " + fmt(r.growth_excess)};
}

// 9 ----------------------------------------------------------------------
Outcome noncompactness() {
    constexpr double kFloor = 0.1;
    constexpr double kStability = 0.2;
    const NormSpec l2 = NormSpec::lp(2);
    auto alpha = [&](std::size_t n) {
        const GridPtr g = Grid::uniform(n);
        const IntegralOperator op(kuramoto(), g);
        return compactness_probe(op, GridFunction::zero(g), l2, l2, 1.0, 1200, 32, 9);
    };
    const auto a = alpha(256);
    const auto b = alpha(512);
    const double drift = std::abs(b.alpha_lower - a.alpha_lower) / a.alpha_lower;
    return {a.alpha_lower > kFloor && drift <= kStability && a.verdict == Verdict::DegeneracyWitnessed,
            "alpha_lower(256) " + fmt(a.alpha_lower) + ", alpha_lower(512) " + fmt(b.alpha_lower) +
                ", relative drift " + fmt(drift) + ", verdict " + to_string(a.verdict)};
}

// 10 ---------------------------------------------------------------------
const std::vector<std::string>& corpus() {
    static const std::vector<std::string> c = {
        "sin(u - v)", "t*v", "u^2", "v^3 - 2*v + 1", "exp(-u*v)", "cos(t + s)*sin(u)", "u/(1 + v^2)",
        "pow(u, 2.5)", "abs(t - 0.5)*v", "-u^2 + 3*u*v - v^2", "sin(u)*cos(v)*exp(t)", "(u + v)^3", "2^u",
        "u^v", "exp(sin(u - v))", "1/(1 + exp(-u))", "t*s*u*v", "sin(pi*t)*v^2", "cos(u)^2 + sin(v)^2",
        "(1 + t)*u^2/(2 + s)", "exp(-(u - v)^2)", "u*exp(-v)", "sin(u*v + t)", "(u - 1)^4", "-sin(-u)",
        "u^0.5", "v/(u + 2)", "cos(cos(u))", "exp(u)*exp(v)", "3*u - 2*v + t - s", "sin(u)^3",
        "(t - s)*sin(v)", "u^2*v^2*t", "exp(-t*u^2)", "sin(u - v) + 0.5*sin(2*(u - v))", "1/(u^2 + v^2 + 1)",
        "pow(v, 3)*cos(t)", "(u + 1)^(-2)", "abs(s - t)*sin(u - v)", "exp(cos(v))*u", "sin(2*pi*s)*u*v",
        "u - u^3/6 + u^5/120", "(v - t)^2*(u + s)", "cos(u + v)/(2 + sin(t))", "exp(u - v) - exp(v - u)",
        "u*v/(1 + u*v)", "2^(-v)*u", "sin(u)/(1 + t^2)", "(u*v)^1.5", "-(u - v)^2/2"};
    return c;
}

Outcome parser_and_determinism() {
    constexpr double kFdTol = 1e-6;
    constexpr double kFdStep = 1e-5;
    const VarSet all = VarSet::of("tsuv");
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> pt(0.3, 1.2);
    int roundtrip_failures = 0;
    double worst_fd = 0.0;
    for (const auto& text : corpus()) {
        const Expr e = parse_expr(text, all);
        const std::string printed = e.to_string();
        const Expr again = parse_expr(printed, all);
        if (!again.structurally_equal(e) || again.to_string() != printed) ++roundtrip_failures;
        for (std::size_t v = 0; v < kVarCount; ++v) {
            const Var var = static_cast<Var>(v);
            if (!e.uses(var)) continue;
            std::optional<CompiledExpr> d;
            try {
                d = CompiledExpr(diff_expr(e, var));
            } catch (const Error& err) {
                if (text.find("abs") == std::string::npos) throw;
                continue;
            }
            const CompiledExpr f(e);
            for (int k = 0; k < 5; ++k) {
                std::array<double, kVarCount> at{pt(rng), pt(rng), pt(rng), pt(rng)};
                auto hi = at, lo = at;
                hi[v] += kFdStep;
                lo[v] -= kFdStep;
                const double fd = (f(hi) - f(lo)) / (2 * kFdStep);
                const double sym = (*d)(at);
                worst_fd = std::max(worst_fd, std::abs(fd - sym) / std::max(1.0, std::abs(sym)));
            }
        }
    }

    // fixed seeds: re-running a config, and re-running from its report, gives identical CSV
    const std::vector<std::string> configs = {
        R"J({"grid":{"n":32},"kernels":{"k2":"sin(u - v)"},
            "probe":{"name":"frechet_residual","parameters":{"amplitude":1.5707963267948966,"levels":8}},"seed":1})J",
        R"J({"grid":{"n":32},"kernels":{"k2":"sin(u - v)"},
            "probe":{"name":"darbo_growth","parameters":{"radii":[0.5,0.1],"trials":40}},"seed":2})J",
        R"J({"grid":{"n":32},"kernels":{"k0":"sin(u)"},
            "probe":{"name":"lipschitz_local","parameters":{"r":1,"trials":200}},"seed":3})J",
        R"J({"grid":{"n":32},"kernels":{"k2":"sin(u - v)"},
            "probe":{"name":"compactness","parameters":{"r":1,"trials":60,"k_budget":4}},"seed":4})J",
        R"J({"grid":{"n":16},"kernels":{"k2":"u*(2 + sin(v))"},
            "probe":{"name":"lipschitz_transfer","parameters":{"r":0.5,"trials":50,"tau":1.25,"ell":0}},"seed":5})J"};
    int nondeterministic = 0;
    for (const auto& text : configs) {
        const RunResult a = run_config(parse_config_text(text));
        const RunResult b = run_config(parse_config_text(text));
        const RunResult c = run_config(parse_config_text(a.report.dump()));
        if (a.csv != b.csv || a.csv != c.csv || a.report != b.report) ++nondeterministic;
    }
    return {roundtrip_failures == 0 && worst_fd <= kFdTol && nondeterministic == 0,
            std::to_string(corpus().size()) + " expressions, round-trip failures " +
                std::to_string(roundtrip_failures) + ", max derivative error " + fmt(worst_fd) +
                ", nondeterministic configs " + std::to_string(nondeterministic)};
}

// 11 ---------------------------------------------------------------------
Outcome appendix_checks() {
    constexpr double kEps = 0.05;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    int stability_fail = 0;
    double worst_ratio = 0.0;
    for (int k = 0; k < 20; ++k) {
        YoungPtr phi;
        std::ostringstream text;
        text.precision(6);
        switch (k % 4) {
            case 0: text << "u^(" << 1.0 + u01(rng) << " + " << 2.0 * u01(rng) << "*t)"; break;
            case 1: text << "(1 + " << 3.0 * u01(rng) << "*t)*u^" << 1.0 + 2.0 * u01(rng); break;
            case 2: text << "u^2 + " << 2.0 * u01(rng) << "*t*u^4"; break;
            default: break;
        }
        if (k % 4 == 3) {
            const double lo = 1.0 + u01(rng), hi = 2.0 + 2.0 * u01(rng), cut = u01(rng);
            phi = YoungFunction::variable_exponent([=](double t) { return t <= cut ? lo : hi; }, "u^p(t) step");
        } else {
            phi = YoungFunction::from_text(text.str());
        }
        const GridPtr base = Grid::uniform(4 + static_cast<std::size_t>(k % 5));
        std::vector<double> a1(base->size()), a2(base->size());
        for (std::size_t i = 0; i < a1.size(); ++i) {
            a1[i] = u01(rng) < 0.2 ? 0.0 : 3.0 * u01(rng);
            a2[i] = 3.0 * u01(rng);
        }
        const auto r = average_stability_check(a1, a2, base, NormSpec::orlicz(phi), 1.0, kEps, 1000,
                                               static_cast<std::uint64_t>(k));
        worst_ratio = std::max(worst_ratio, r.worst_ratio);
        if (r.verdict != CheckVerdict::Pass) ++stability_fail;
    }

    auto curve = [](const std::function<std::vector<double>(double)>& phi) {
        std::vector<std::vector<double>> s;
        for (int i = 0; i <= 100; ++i) s.push_back(phi(i / 100.0));
        return mean_value_check(s, 0.01);
    };
    const auto circle = curve([](double l) { return std::vector<double>{std::cos(l), std::sin(l)}; });
    const auto flat = curve([](double) { return std::vector<double>{3.0, -1.0}; });
    const auto square = curve([](double l) { return std::vector<double>{l * l}; });
    const bool mean_ok = circle.verdict == CheckVerdict::Pass && flat.verdict == CheckVerdict::Pass &&
                         square.verdict == CheckVerdict::Pass &&
                         std::abs(circle.lhs - std::sqrt(2 - 2 * std::cos(1.0))) <= 1e-12;

    double worst_simple = 0.0;
    for (int k = 0; k < 100; ++k) {
        const GridPtr g = Grid::uniform(16 + static_cast<std::size_t>(k % 7) * 9);
        const std::size_t dim = 1 + static_cast<std::size_t>(k % 3);
        std::vector<double> v(g->size() * dim);
        for (std::size_t i = 0; i < g->size(); ++i) {
            const bool zero = u01(rng) < 0.15;
            const double mag = std::exp(8.0 * (u01(rng) - 0.5));
            for (std::size_t c = 0; c < dim; ++c) v[i * dim + c] = zero ? 0.0 : mag * (2.0 * u01(rng) - 1.0);
        }
        const GridFunction x(g, dim, v);
        const double eps = 0.01 + 0.4 * u01(rng);
        const GridFunction y = simple_approx(x, eps);
        for (std::size_t i = 0; i < g->size(); ++i) {
            double d = 0.0;
            for (std::size_t c = 0; c < dim; ++c) d += std::pow(x.value(i)[c] - y.value(i)[c], 2);
            const double mag = x.magnitude(i);
            const double rel = mag == 0.0 ? (d == 0.0 ? 0.0 : 1e300) : std::sqrt(d) / mag / eps;
            worst_simple = std::max(worst_simple, rel);
        }
    }
    return {stability_fail == 0 && mean_ok && worst_simple <= 1.0,
            "average stability failures " + std::to_string(stability_fail) + " (worst ratio " + fmt(worst_ratio) +
                "), mean value " + (mean_ok ? "ok" : "failed") + ", simple_approx max error/eps " +
                fmt(worst_simple)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "kuramoto_frechet_residual", 10, kuramoto_residual},
        {2, "affine_residual_baseline", 5, affine_baseline},
        {3, "d2g_finite_difference_consistency", 30, d2g_finite_differences},
        {4, "mixture_set_nondegeneracy", 60, mixture_nondegeneracy},
        {5, "pointwise_lipschitz_transfer", 10, pointwise_lipschitz_transfer},
        {6, "lipschitz_violation_detection", 1, lipschitz_violation},
        {7, "luxemburg_norm_correctness", 5, luxemburg_norms},
        {8, "darbo_growth_bound", 60, darbo_bound},
        {9, "noncompactness_witness", 120, noncompactness},
        {10, "parser_differentiator_determinism", 5, parser_and_determinism},
        {11, "appendix_checks", 30, appendix_checks},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_seconds;
        const bool pass = o.ok && in_time;
        if (!pass) ++failed;
        std::printf("%s [%d] %s (%.2f s of %.0f s): %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    c.budget_seconds, o.detail.c_str(), in_time ? "" : " [over time budget]");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
