#include "funcspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace degenkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclid(std::span<const double> v) {
    if (v.size() == 1) return std::abs(v[0]);
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(GridPtr grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
    require(grid_ != nullptr, "grid function: null grid");
    require(dim_ >= 1, "grid function: dimension must be >= 1");
    require(values_.size() == grid_->size() * dim_, "grid function: value count does not match cell count");
    for (double v : values_) {
        if (!std::isfinite(v)) fail(ErrorKind::Numeric, "grid function: non-finite value");
    }
}

GridFunction GridFunction::zero(const GridPtr& grid, std::size_t dim) {
    return GridFunction(grid, dim, std::vector<double>(grid->size() * dim, 0.0));
}

GridFunction GridFunction::constant(const GridPtr& grid, double value) {
    return GridFunction(grid, 1, std::vector<double>(grid->size(), value));
}

GridFunction GridFunction::scalar(const GridPtr& grid, std::vector<double> values) {
    return GridFunction(grid, 1, std::move(values));
}

GridFunction GridFunction::sample(const GridPtr& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->cell(i).representative);
    return GridFunction(grid, 1, std::move(v));
}

GridFunction GridFunction::indicator(const SubsetMask& mask, double value) {
    std::vector<double> v(mask.grid()->size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (mask.contains(i)) v[i] = value;
    }
    return GridFunction(mask.grid(), 1, std::move(v));
}

double GridFunction::magnitude(std::size_t cell) const { return euclid(value(cell)); }

std::vector<double> GridFunction::magnitudes() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = magnitude(i);
    return out;
}

GridFunction GridFunction::transport(const Refinement& ref) const {
    if (!same_grid(grid_, ref.coarse)) fail(ErrorKind::GridMismatch, "transport: refinement starts on another grid");
    std::vector<double> v(ref.fine->size() * dim_);
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t c = ref.children_begin(i); c < ref.children_end(i); ++c) {
            std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_,
                        v.begin() + static_cast<std::ptrdiff_t>(c * dim_));
        }
    }
    return GridFunction(ref.fine, dim_, std::move(v));
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* context) {
    if (!same_grid(a.grid(), b.grid())) fail(ErrorKind::GridMismatch, std::string(context) + ": grid mismatch");
    if (a.dim() != b.dim()) fail(ErrorKind::GridMismatch, std::string(context) + ": value dimension mismatch");
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
    require_same_grid(*this, other, "add");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
    return GridFunction(grid_, dim_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
    require_same_grid(*this, other, "subtract");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
    return GridFunction(grid_, dim_, std::move(v));
}

GridFunction GridFunction::operator*(double s) const {
    std::vector<double> v(values_);
    for (double& c : v) c *= s;
    return GridFunction(grid_, dim_, std::move(v));
}

GridFunction GridFunction::scaled_by(std::span<const double> factors) const {
    require(factors.size() == size(), "scaled_by: factor count does not match cell count");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t k = 0; k < dim_; ++k) v[i * dim_ + k] *= factors[i];
    }
    return GridFunction(grid_, dim_, std::move(v));
}

bool GridFunction::operator==(const GridFunction& other) const {
    return same_grid(grid_, other.grid_) && dim_ == other.dim_ && values_ == other.values_;
}

// ---------------------------------------------------------------------------
// Young functions

YoungFunction::YoungFunction(Callable phi, std::string description, double t_max)
    : phi_(std::move(phi)), description_(std::move(description)), t_max_(t_max) {
    require(t_max_ > 0.0 && std::isfinite(t_max_), "Young function: t_max must be positive");
}

void YoungFunction::validate() const {
    constexpr int kSamples = 32;
    std::vector<double> ladder(kSamples);
    ladder[0] = 0.0;
    for (int j = 1; j < kSamples; ++j) ladder[j] = std::exp2(0.5 * (j - 16));

    auto where = [&](double t, double u) {
        std::ostringstream os;
        os << "Young function '" << description_ << "' at t=" << t << ", u=" << u << ": ";
        return os.str();
    };

    for (int k = 0; k < kSamples; ++k) {
        const double t = t_max_ * (k + 0.5) / kSamples;
        std::vector<double> vals(kSamples);
        bool nonzero = false;
        for (int j = 0; j < kSamples; ++j) {
            vals[j] = phi_(t, ladder[j]);
            if (std::isnan(vals[j]) || vals[j] < 0.0) {
                fail(ErrorKind::InvalidArgument, where(t, ladder[j]) + "value must be >= 0");
            }
            nonzero = nonzero || vals[j] > 0.0;
        }
        if (vals[0] != 0.0) fail(ErrorKind::InvalidArgument, where(t, 0.0) + "Phi(t,0) must be 0");
        if (!nonzero) fail(ErrorKind::InvalidArgument, where(t, ladder.back()) + "identically zero in u");
        for (int j = 0; j + 1 < kSamples; ++j) {
            const double a = vals[j];
            const double b = vals[j + 1];
            if (b < a * (1.0 - 1e-12)) {
                fail(ErrorKind::InvalidArgument, where(t, ladder[j + 1]) + "not nondecreasing in u");
            }
            if (std::isinf(b)) continue;
            const double mid = phi_(t, 0.5 * (ladder[j] + ladder[j + 1]));
            const double slack = 1e-12 * (a + b) + 1e-300;
            if (mid > 0.5 * (a + b) + slack) {
                fail(ErrorKind::InvalidArgument, where(t, ladder[j]) + "not midpoint-convex in u");
            }
            // convexity through the origin: Phi(t, u/2) <= Phi(t, u)/2
            const double half = phi_(t, 0.5 * ladder[j + 1]);
            if (half > 0.5 * b + slack) {
                fail(ErrorKind::InvalidArgument, where(t, ladder[j + 1]) + "not midpoint-convex in u");
            }
        }
    }
}

YoungPtr YoungFunction::from_callable(Callable phi, std::string description, double t_max) {
    auto y = std::shared_ptr<const YoungFunction>(new YoungFunction(std::move(phi), std::move(description), t_max));
    y->validate();
    return y;
}

YoungPtr YoungFunction::from_expr(const Expr& phi, double t_max) {
    if (!phi.variables().subset_of(VarSet::of("tu"))) {
        fail(ErrorKind::InvalidArgument, "Young function may only use t and u");
    }
    CompiledExpr code(phi);
    return from_callable([code](double t, double u) { return code({t, 0.0, u, 0.0}); }, phi.to_string(), t_max);
}

YoungPtr YoungFunction::from_text(const std::string& text, double t_max) {
    return from_expr(parse_expr(text, VarSet::of("tu")), t_max);
}

YoungPtr YoungFunction::power(double p) {
    require(p >= 1.0 && std::isfinite(p), "power Young function needs finite p >= 1");
    std::ostringstream os;
    os << "u^" << p;
    return from_callable([p](double, double u) { return std::pow(u, p); }, os.str());
}

YoungPtr YoungFunction::variable_exponent(std::function<double(double)> p, std::string description, double t_max) {
    auto phi = [p = std::move(p)](double t, double u) {
        const double e = p(t);
        if (std::isinf(e)) return u <= 1.0 ? 0.0 : kInf;
        return std::pow(u, e);
    };
    return from_callable(std::move(phi), std::move(description), t_max);
}

// ---------------------------------------------------------------------------
// NormSpec

NormSpec NormSpec::lp(double p) {
    require(p >= 1.0 && !std::isnan(p), "Lp norm needs p >= 1");
    return NormSpec(LpNorm{p});
}

NormSpec NormSpec::linf() { return NormSpec(LpNorm{kInf}); }

NormSpec NormSpec::orlicz(YoungPtr phi) {
    require(phi != nullptr, "Orlicz norm needs a Young function");
    return NormSpec(OrliczNorm{std::move(phi)});
}

double NormSpec::p() const {
    if (!is_lp()) fail(ErrorKind::InvalidArgument, "p() on an Orlicz norm");
    return std::get<LpNorm>(variant_).p;
}

const YoungFunction& NormSpec::young() const {
    if (is_lp()) fail(ErrorKind::InvalidArgument, "young() on an Lp norm");
    return *std::get<OrliczNorm>(variant_).phi;
}

std::string NormSpec::describe() const {
    std::ostringstream os;
    if (is_lp()) {
        const double pp = p();
        if (std::isinf(pp)) {
            os << "Linf";
        } else {
            os << "L" << pp;
        }
    } else {
        os << "Orlicz(" << young().description() << ")";
    }
    return os.str();
}

double NormSpec::phi(double t, double u) const {
    if (is_lp()) {
        const double pp = p();
        if (std::isinf(pp)) return u <= 1.0 ? 0.0 : kInf;
        return std::pow(u, pp);
    }
    return young()(t, u);
}

// ---------------------------------------------------------------------------
// norms

double modular(const GridFunction& x, const YoungFunction& phi, double lambda) {
    const auto& g = *x.grid();
    const auto w = g.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = x.magnitude(i);
        if (m == 0.0) continue;
        const double val = phi(g.cell(i).representative, m / lambda);
        if (std::isnan(val)) fail(ErrorKind::Numeric, "Young function returned NaN");
        if (std::isinf(val)) return kInf;
        sum += w[i] * val;
    }
    return sum;
}

namespace {

double lp_norm(const GridFunction& x, double p) {
    const auto w = x.grid()->weights();
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) peak = std::max(peak, x.magnitude(i));
    if (peak == 0.0 || std::isinf(p)) return peak;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x.magnitude(i) / peak;
        if (r == 0.0) continue;
        sum += w[i] * (p == 1.0 ? r : p == 2.0 ? r * r : std::pow(r, p));
    }
    return peak * (p == 1.0 ? sum : p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0 / p));
}

double luxemburg_norm(const GridFunction& x, const YoungFunction& phi) {
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) peak = std::max(peak, x.magnitude(i));
    if (peak == 0.0) return 0.0;

    // modular is nonincreasing in lambda: bracket [lo, hi] with
    // modular(lo) > 1 >= modular(hi), then bisect.
    constexpr int kMaxBracket = 2100;
    double hi = peak;
    int guard = 0;
    while (modular(x, phi, hi) > 1.0) {
        hi *= 2.0;
        if (++guard > kMaxBracket || std::isinf(hi)) {
            fail(ErrorKind::Numeric, "Orlicz modular exceeds 1 for every lambda");
        }
    }
    double lo = hi * 0.5;
    guard = 0;
    while (modular(x, phi, lo) <= 1.0) {
        hi = lo;
        lo *= 0.5;
        if (++guard > kMaxBracket || lo == 0.0) {
            fail(ErrorKind::Numeric, "Orlicz modular vanishes on the support of a nonzero function");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (modular(x, phi, mid) <= 1.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace

double norm(const GridFunction& x, const NormSpec& ns) {
    if (ns.is_lp()) return lp_norm(x, ns.p());
    return luxemburg_norm(x, ns.young());
}

double distance(const GridFunction& a, const GridFunction& b, const NormSpec& ns) { return norm(a - b, ns); }

GridFunction project(const GridFunction& x, const SubsetMask& mask) {
    if (!same_grid(x.grid(), mask.grid())) fail(ErrorKind::GridMismatch, "project: grid mismatch");
    std::vector<double> v(x.values().begin(), x.values().end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!mask.contains(i)) std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(i * x.dim()), x.dim(), 0.0);
    }
    return GridFunction(x.grid(), x.dim(), std::move(v));
}

SubsetMask support(const GridFunction& x) {
    std::vector<std::uint8_t> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = x.magnitude(i) > 0.0 ? 1 : 0;
    return SubsetMask(x.grid(), std::move(f));
}

// ---------------------------------------------------------------------------
// constructive lemmas

ShrinkResult shrink_support(const GridFunction& x, const SubsetMask& t_mask, double eps, const NormSpec& ns,
                            int max_refine) {
    require(eps > 0.0, "shrink_support: eps must be positive");
    if (!same_grid(x.grid(), t_mask.grid())) fail(ErrorKind::GridMismatch, "shrink_support: grid mismatch");
    const SubsetMask live = t_mask.intersect(support(x));
    if (live.count() == 0) fail(ErrorKind::InvalidArgument, "shrink_support: t_mask misses the support of x");

    Refinement ref = identity_refinement(x.grid());
    const double whole = norm(project(x, t_mask), ns);
    if (whole < eps) return ShrinkResult{ref, t_mask, x, whole};

    GridFunction cur = x;
    SubsetMask d = SubsetMask::single(x.grid(), live.members().front());
    for (int k = 0;; ++k) {
        const double achieved = norm(project(cur, d), ns);
        if (achieved < eps) return ShrinkResult{std::move(ref), std::move(d), std::move(cur), achieved};
        if (k >= max_refine) {
            std::ostringstream os;
            os << "shrink_support: " << max_refine << " refinements insufficient, achieved norm " << achieved
               << " >= eps " << eps;
            fail(ErrorKind::Numeric, os.str());
        }
        const std::size_t cell = d.members().front();
        Refinement step = refine_cells(cur.grid(), d.flags());
        cur = cur.transport(step);
        d = SubsetMask::single(step.fine, step.children_begin(cell));
        ref = compose(ref, step);
    }
}

GridFunction simple_approx(const GridFunction& x, double eps) {
    require(eps > 0.0, "simple_approx: eps must be positive");
    const std::size_t dim = x.dim();
    struct Band {
        int exponent;
        std::vector<std::vector<double>> net;
    };
    std::vector<Band> bands;
    std::vector<double> out(x.values().begin(), x.values().end());

    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mag = x.magnitude(i);
        if (mag == 0.0) continue;
        int exponent = 0;
        std::frexp(mag, &exponent);
        const double floor_k = std::ldexp(1.0, exponent - 1);  // inf of the band, <= mag
        const double radius = eps * floor_k;

        auto band = std::find_if(bands.begin(), bands.end(), [&](const Band& b) { return b.exponent == exponent; });
        if (band == bands.end()) {
            bands.push_back(Band{exponent, {}});
            band = std::prev(bands.end());
        }
        const auto v = x.value(i);
        const std::vector<double>* snap = nullptr;
        for (const auto& u : band->net) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) d2 += (v[k] - u[k]) * (v[k] - u[k]);
            if (std::sqrt(d2) <= radius) {
                snap = &u;
                break;
            }
        }
        if (snap == nullptr) {
            band->net.emplace_back(v.begin(), v.end());
            snap = &band->net.back();
        }
        std::copy(snap->begin(), snap->end(), out.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    return GridFunction(x.grid(), dim, std::move(out));
}

std::optional<double> embedding_constant(const NormSpec& ns_x, const NormSpec& ns_y, double total_measure) {
    if (ns_x.is_lp() && ns_y.is_lp()) {
        const double px = ns_x.p();
        const double py = ns_y.p();
        if (px > py) return std::nullopt;
        const double ix = std::isinf(px) ? 0.0 : 1.0 / px;
        const double iy = std::isinf(py) ? 0.0 : 1.0 / py;
        return std::pow(total_measure, ix - iy);
    }
    if (!ns_x.is_lp() && !ns_y.is_lp() && &ns_x.young() == &ns_y.young()) return 1.0;
    return std::nullopt;
}

VpairWitness vpair_witness(const GridFunction& x, const GridFunction& y, const SubsetMask& t_mask,
                           const NormSpec& ns_x, const NormSpec& ns_y, int steps) {
    require(steps >= 1, "vpair_witness: steps must be >= 1");
    if (!same_grid(x.grid(), y.grid()) || !same_grid(x.grid(), t_mask.grid())) {
        fail(ErrorKind::GridMismatch, "vpair_witness: grid mismatch");
    }

    long long n_factor = std::numeric_limits<long long>::max();
    for (std::size_t i : t_mask.members()) {
        const double my = y.magnitude(i);
        if (my == 0.0) continue;
        const double q = std::floor(x.magnitude(i) / my) + 1.0;
        if (q < static_cast<double>(n_factor)) n_factor = static_cast<long long>(q);
    }
    if (n_factor == std::numeric_limits<long long>::max()) {
        fail(ErrorKind::InvalidArgument, "vpair_witness: P_T y vanishes");
    }

    std::vector<std::uint8_t> tn(x.size(), 0);
    for (std::size_t i : t_mask.members()) {
        tn[i] = static_cast<double>(n_factor) * y.magnitude(i) > x.magnitude(i) ? 1 : 0;
    }

    VpairWitness out;
    out.n_factor = n_factor;
    out.embedding = embedding_constant(ns_x, ns_y, x.grid()->total_measure());
    if (out.embedding) out.bound = static_cast<double>(n_factor) * *out.embedding;

    GridFunction cx = x;
    GridFunction cy = y;
    SubsetMask d(x.grid(), std::move(tn));
    for (int n = 0; n < steps; ++n) {
        if (n > 0) {
            EqualSplit split = equal_split(d);
            if (split.refinement) {
                cx = cx.transport(*split.refinement);
                cy = cy.transport(*split.refinement);
            }
            d = std::move(split.first);
        }
        GridFunction xn = project(cx, d);
        const double nx = norm(xn, ns_x);
        const double ny = norm(project(cy, d), ns_y);
        out.steps.push_back(VpairStep{d, xn, d.measure(), nx, ny, nx / ny});
    }
    return out;
}

const char* to_string(CheckVerdict v) noexcept { return v == CheckVerdict::Pass ? "PASS" : "FAIL"; }

AverageStabilityResult average_stability_check(std::span<const double> a1, std::span<const double> a2,
                                               const GridPtr& base, const NormSpec& ns, double c, double eps,
                                               int trials, std::uint64_t seed) {
    require(base != nullptr, "average_stability_check: null grid");
    require(a1.size() == base->size() && a2.size() == base->size(),
            "average_stability_check: coefficient count does not match cell count");
    require(c >= 1.0, "average_stability_check: c must be >= 1");
    require(eps > 0.0, "average_stability_check: eps must be positive");
    require(trials >= 1, "average_stability_check: trials must be >= 1");
    bool any = false;
    for (std::size_t i = 0; i < a1.size(); ++i) {
        require(a1[i] >= 0.0 && a2[i] >= 0.0, "average_stability_check: coefficients must be nonnegative");
        any = any || a1[i] + a2[i] > 0.0;
    }
    if (!any) fail(ErrorKind::InvalidArgument, "average_stability_check: x vanishes identically");

    // Band refinement: split a partition cell until Phi(t, a_j / lambda)
    // varies by at most a factor 1 + eps over its four quarter cells.
    GridPtr part = base;
    std::vector<std::size_t> owner(base->size());
    for (std::size_t i = 0; i < owner.size(); ++i) owner[i] = i;

    auto x_on = [&](const GridPtr& g, const std::vector<std::size_t>& own, std::size_t fan) {
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::size_t o = own[i / fan];
            v[i] = 0.5 * (a1[o] + a2[o]);
        }
        return GridFunction::scalar(g, std::move(v));
    };
    const double lambda = norm(x_on(base, owner, 1), ns);

    auto band_ok = [&](double lo, double width, double a) {
        if (a == 0.0) return true;
        double vmin = kInf, vmax = 0.0;
        for (int q = 0; q < 4; ++q) {
            const double t = lo + width * (q + 0.5) / 4.0;
            const double val = ns.phi(t, a / lambda);
            vmin = std::min(vmin, val);
            vmax = std::max(vmax, val);
        }
        if (vmax == 0.0) return true;
        if (std::isinf(vmin)) return true;
        if (std::isinf(vmax)) return false;
        return vmax <= (1.0 + eps) * vmin;
    };

    constexpr std::size_t kMaxCells = std::size_t{1} << 16;
    for (int round = 0; round < 40; ++round) {
        std::vector<std::uint8_t> split(part->size(), 0);
        bool any_split = false;
        for (std::size_t i = 0; i < part->size(); ++i) {
            const Cell& cell = part->cell(i);
            const std::size_t o = owner[i];
            if (!band_ok(cell.left, cell.measure, a1[o]) || !band_ok(cell.left, cell.measure, a2[o])) {
                split[i] = 1;
                any_split = true;
            }
        }
        if (!any_split || part->size() * 2 > kMaxCells) break;
        Refinement r = refine_cells(part, split);
        const auto parent = r.parent_map();
        std::vector<std::size_t> next(r.fine->size());
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = owner[parent[i]];
        owner = std::move(next);
        part = r.fine;
    }

    // Evaluation grid: each partition cell D_n as four quarters; a split of
    // D_n into halves of equal measure assigns two quarters to a1, two to a2.
    const GridPtr quarters = refine(refine(part).fine).fine;
    const GridFunction x = x_on(quarters, owner, 4);
    const double x_norm = norm(x, ns);

    std::vector<double> ratios(static_cast<std::size_t>(trials));
    parallel_for(ratios.size(), [&](std::size_t trial) {
        std::mt19937_64 rng(sub_seed(seed, trial));
        std::vector<double> w(quarters->size());
        std::array<int, 4> slots{0, 1, 2, 3};
        for (std::size_t n = 0; n < part->size(); ++n) {
            std::shuffle(slots.begin(), slots.end(), rng);
            const std::size_t o = owner[n];
            for (int q = 0; q < 4; ++q) {
                w[4 * n + static_cast<std::size_t>(slots[q])] = q < 2 ? a1[o] : a2[o];
            }
        }
        const double w_norm = norm(GridFunction::scalar(quarters, std::move(w)), ns);
        ratios[trial] = x_norm / (c * w_norm);
    });
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    return AverageStabilityResult{worst, worst <= 1.0 + eps ? CheckVerdict::Pass : CheckVerdict::Fail, part->size()};
}

MeanValueResult mean_value_check(std::span<const std::vector<double>> samples, double step) {
    require(samples.size() >= 3, "mean_value_check: need at least 3 samples");
    require(step > 0.0, "mean_value_check: step must be positive");
    const std::size_t dim = samples.front().size();
    for (const auto& s : samples) require(s.size() == dim, "mean_value_check: inconsistent sample dimension");

    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return std::sqrt(s);
    };
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        m = std::max(m, dist(samples[i + 1], samples[i - 1]) / (2.0 * step));
    }
    const double length = step * static_cast<double>(samples.size() - 1);
    const double lhs = dist(samples.back(), samples.front());
    const double bound = m * length;
    return MeanValueResult{lhs, bound, m, lhs <= bound * (1.0 + 1e-6) ? CheckVerdict::Pass : CheckVerdict::Fail};
}

}  // namespace degenkit
