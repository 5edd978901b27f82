#include "probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include <Eigen/Dense>

#include "error.hpp"
#include "parallel.hpp"

namespace degenkit {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::DegeneracyWitnessed: return "DEGENERACY_WITNESSED";
        case Verdict::NoWitnessFound: return "NO_WITNESS_FOUND";
        case Verdict::BoundSatisfied: return "BOUND_SATISFIED";
        case Verdict::BoundViolated: return "BOUND_VIOLATED";
    }
    return "?";
}

namespace {

// Distances between raw value arrays on one grid. Lp norms are computed
// directly, anything else goes through norm().
class Metric {
public:
    Metric(GridPtr grid, std::size_t dim, NormSpec ns) : grid_(std::move(grid)), dim_(dim), ns_(std::move(ns)) {}

    double operator()(std::span<const double> a, std::span<const double> b) const {
        const auto w = grid_->weights();
        const std::size_t n = grid_->size();
        if (!ns_.is_lp()) {
            std::vector<double> d(a.size());
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = a[k] - b[k];
            return norm(GridFunction(grid_, dim_, std::move(d)), ns_);
        }
        const double p = ns_.p();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m;
            if (dim_ == 1) {
                m = std::abs(a[i] - b[i]);
            } else {
                double s = 0.0;
                for (std::size_t c = 0; c < dim_; ++c) {
                    const double d = a[i * dim_ + c] - b[i * dim_ + c];
                    s += d * d;
                }
                m = std::sqrt(s);
            }
            if (std::isinf(p)) {
                acc = std::max(acc, m);
            } else if (p == 1.0) {
                acc += w[i] * m;
            } else if (p == 2.0) {
                acc += w[i] * m * m;
            } else {
                acc += w[i] * std::pow(m, p);
            }
        }
        if (std::isinf(p) || p == 1.0) return acc;
        if (p == 2.0) return std::sqrt(acc);
        return std::pow(acc, 1.0 / p);
    }

private:
    GridPtr grid_;
    std::size_t dim_;
    NormSpec ns_;
};

GridFunction gaussian_unit(const GridPtr& grid, std::size_t dim, const NormSpec& ns, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(grid->size() * dim);
    for (;;) {
        for (double& x : v) x = normal(rng);
        GridFunction g(grid, dim, v);
        const double len = norm(g, ns);
        if (len > 0.0) return g * (1.0 / len);
    }
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void require_ball(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::InvalidArgument, "radius must be positive and finite");
}

void require_decreasing(const std::vector<double>& radii) {
    require(!radii.empty(), "at least one radius required");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        require_ball(radii[k]);
        if (k > 0 && !(radii[k] < radii[k - 1])) {
            fail(ErrorKind::InvalidArgument, "radii must be strictly decreasing");
        }
    }
}

std::vector<GridFunction> map_all(const std::vector<GridFunction>& xs,
                                  const std::function<GridFunction(const GridFunction&)>& f) {
    std::vector<std::optional<GridFunction>> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = f(xs[i]); });
    std::vector<GridFunction> result;
    result.reserve(xs.size());
    for (auto& y : out) result.push_back(std::move(*y));
    return result;
}

double max_pairwise(const std::vector<GridFunction>& ys, const Metric& dist) {
    std::vector<double> row_max(ys.size(), 0.0);
    parallel_for(ys.size(), [&](std::size_t i) {
        double m = 0.0;
        for (std::size_t j = i + 1; j < ys.size(); ++j) m = std::max(m, dist(ys[i].values(), ys[j].values()));
        row_max[i] = m;
    });
    double m = 0.0;
    for (double v : row_max) m = std::max(m, v);
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// BallSampler

BallSampler::BallSampler(GridFunction center, double r, NormSpec ns, std::uint64_t seed, int dyadic_level)
    : center_(std::move(center)), r_(r), ns_(std::move(ns)), seed_(seed), level_(dyadic_level) {
    require_ball(r);
    require(dyadic_level >= 1 && dyadic_level <= 30, "dyadic level must be in [1, 30]");
}

GridFunction BallSampler::perturbation(std::size_t j) const {
    const GridPtr& grid = center_.grid();
    const std::size_t dim = center_.dim();
    const std::size_t n = grid->size();
    std::mt19937_64 rng(sub_seed(seed_, j));
    switch (j % 3) {
        case 0: {
            const double rho = uniform01(rng) * r_;
            return gaussian_unit(grid, dim, ns_, rng) * rho;
        }
        case 1: {
            const std::size_t cell = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
            std::vector<double> v(n * dim, 0.0);
            for (std::size_t c = 0; c < dim; ++c) v[cell * dim + c] = 1.0 / std::sqrt(double(dim));
            GridFunction chi(grid, dim, std::move(v));
            return chi * (r_ / norm(chi, ns_));
        }
        default: {
            // only the dyadic bits are drawn here, so D does not depend on the grid
            const std::size_t pieces = std::size_t{1} << level_;
            std::vector<std::uint8_t> chosen(pieces);
            for (auto& b : chosen) b = static_cast<std::uint8_t>(rng() >> 63);
            const double total = grid->total_measure();
            std::vector<double> v(n * dim, 0.0);
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                const double rel = grid->cell(i).representative / total;
                const auto idx = std::min(pieces - 1, static_cast<std::size_t>(rel * double(pieces)));
                if (chosen[idx]) {
                    any = true;
                    for (std::size_t c = 0; c < dim; ++c) v[i * dim + c] = 1.0 / std::sqrt(double(dim));
                }
            }
            if (!any) {
                for (double& x : v) x = 1.0 / std::sqrt(double(dim));
            }
            GridFunction chi(grid, dim, std::move(v));
            return chi * (r_ / norm(chi, ns_));
        }
    }
}

GridFunction BallSampler::point(std::size_t i) const {
    const GridFunction h = perturbation(i / 2);
    return i % 2 == 0 ? center_ + h : center_ - h;
}

std::vector<GridFunction> BallSampler::points(std::size_t count) const {
    std::vector<std::optional<GridFunction>> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = point(i); });
    std::vector<GridFunction> result;
    result.reserve(count);
    for (auto& p : out) result.push_back(std::move(*p));
    return result;
}

// ---------------------------------------------------------------------------
// Frechet residual

FrechetResidual frechet_residual(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                                 const NormSpec& ns_y, double amplitude, int levels, double floor) {
    if (amplitude == 0.0 || !std::isfinite(amplitude)) {
        fail(ErrorKind::InvalidArgument, "frechet_residual: amplitude must be nonzero and finite");
    }
    require(levels >= 2 && levels <= 50, "frechet_residual: levels must be in [2, 50]");
    if (!same_grid(x0.grid(), op.grid())) fail(ErrorKind::GridMismatch, "frechet_residual: x0 not on operator grid");

    // refine only the cell containing each boundary 2^-n * total
    const double total = op.grid()->total_measure();
    Refinement acc = identity_refinement(op.grid());
    for (int n = 1; n <= levels; ++n) {
        const double target = std::ldexp(total, -n);
        for (int guard = 0;; ++guard) {
            if (guard > 200) fail(ErrorKind::Numeric, "frechet_residual: cannot place a cell boundary");
            const GridPtr& g = acc.fine;
            double before = 0.0;
            std::size_t cut = g->size();
            for (std::size_t i = 0; i < g->size(); ++i) {
                const double after = before + g->cell(i).measure;
                if (after > target + 1e-12 * total) {
                    if (target - before > 1e-12 * total) cut = i;
                    break;
                }
                before = after;
            }
            if (cut == g->size()) break;
            std::vector<std::uint8_t> flags(g->size(), 0);
            flags[cut] = 1;
            acc = compose(acc, refine_cells(g, flags));
        }
    }

    const GridPtr grid = acc.fine;
    const IntegralOperator fine_op = op.rebind(grid);
    const GridFunction x = x0.transport(acc);
    const GridFunction fx = fine_op.eval_f(x);
    const LinearOp L = fine_op.gateaux_f_matrix(x);

    FrechetResidual result{{}, floor, Verdict::NoWitnessFound, grid->size()};
    for (int n = 1; n <= levels; ++n) {
        const double target = std::ldexp(total, -n);
        std::vector<std::uint8_t> flags(grid->size(), 0);
        double acc_measure = 0.0;
        for (std::size_t i = 0; i < grid->size() && acc_measure < target - 1e-12 * total; ++i) {
            flags[i] = 1;
            acc_measure += grid->cell(i).measure;
        }
        const SubsetMask d(grid, std::move(flags));
        const GridFunction h = GridFunction::indicator(d, amplitude);
        const GridFunction residual = fine_op.eval_f(x + h) - fx - L.apply(h);
        result.curve.parameter.push_back(d.measure());
        result.curve.value.push_back(norm(residual, ns_y) / norm(h, ns_x));
    }

    const std::size_t tail = (static_cast<std::size_t>(levels) + 2) / 3;
    bool witnessed = true;
    for (std::size_t k = result.curve.value.size() - tail; k < result.curve.value.size(); ++k) {
        if (!(result.curve.value[k] > floor)) witnessed = false;
    }
    result.verdict = witnessed ? Verdict::DegeneracyWitnessed : Verdict::NoWitnessFound;
    return result;
}

// ---------------------------------------------------------------------------
// Lipschitz

double lipschitz_local(const IntegralOperator& op, const GridFunction& x0, double r, const NormSpec& ns_x,
                       const NormSpec& ns_y, int trials, std::uint64_t seed) {
    require_ball(r);
    require(trials >= 1, "lipschitz_local: trials must be positive");
    const BallSampler ball(x0, r, ns_x, sub_seed(seed, 0));
    std::vector<double> ratios(static_cast<std::size_t>(trials), 0.0);
    parallel_for(ratios.size(), [&](std::size_t j) {
        std::optional<GridFunction> x, y;
        if (j % 2 == 0) {
            // antithetic pair x0 + h, x0 - h
            x = ball.point(j);
            y = ball.point(j + 1);
        } else {
            std::mt19937_64 rng(sub_seed(seed, j + 1));
            const double rho = uniform01(rng) * r;
            x = x0 + gaussian_unit(x0.grid(), x0.dim(), ns_x, rng) * rho;
            const double eta = uniform01(rng) * (r - rho);
            y = *x + gaussian_unit(x0.grid(), x0.dim(), ns_x, rng) * eta;
        }
        const double dx = distance(*x, *y, ns_x);
        if (dx == 0.0) return;
        ratios[j] = distance(op.eval_f(*x), op.eval_f(*y), ns_y) / dx;
    });
    return *std::max_element(ratios.begin(), ratios.end());
}

PointwiseExcess lipschitz_pointwise(const IntegralOperator& op, const GridFunction& y1, const GridFunction& y2,
                                    const GridFunction& x0, double L1) {
    require_same_grid(y1, y2, "lipschitz_pointwise");
    require_same_grid(y1, x0, "lipschitz_pointwise");
    const GridFunction g1 = op.eval_g(y1, x0);
    const GridFunction g2 = op.eval_g(y2, x0);
    PointwiseExcess best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < y1.size(); ++i) {
        const double excess = std::abs(g1[i] - g2[i]) - L1 * std::abs(y1[i] - y2[i]);
        if (excess > best.max_excess) best = {excess, i};
    }
    return best;
}

TransferCheck lipschitz_transfer(const IntegralOperator& op, const GridFunction& x0, const LipschitzParams& params,
                                 double r, int trials, std::uint64_t seed, const NormSpec& ns_x, const NormSpec& ns_y,
                                 double tolerance) {
    require_ball(r);
    require(trials >= 1, "lipschitz_transfer: trials must be positive");
    require(params.tau >= 0.0 && params.ell >= 0.0, "lipschitz_transfer: tau and ell must be nonnegative");
    const BallSampler ball(x0, r, ns_x, sub_seed(seed, 0));
    const std::size_t pool = 8 * static_cast<std::size_t>(trials);
    std::vector<double> violation(static_cast<std::size_t>(trials), -std::numeric_limits<double>::infinity());
    parallel_for(violation.size(), [&](std::size_t j) {
        std::mt19937_64 rng(sub_seed(seed, j + 1));
        std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
        std::uniform_int_distribution<std::size_t> pick_other(0, pool - 2);
        const std::size_t ix = pick(rng);
        std::size_t iy = pick_other(rng);
        if (iy >= ix) ++iy;  // x != y
        const GridFunction x = ball.point(ix);
        const GridFunction y = ball.point(iy);
        // ||h|| strictly below min(||x - x0||, ||y - x0||)
        const double room = std::min(distance(x, x0, ns_x), distance(y, x0, ns_x));
        GridFunction h = GridFunction::zero(x0.grid(), x0.dim());
        if (room > 0.0) {
            const double len = uniform01(rng) * room;
            if (rng() % 2 == 0) {
                h = gaussian_unit(x0.grid(), x0.dim(), ns_x, rng) * len;
            } else {
                const GridFunction d = ball.perturbation(pick(rng));
                const double dn = norm(d, ns_x);
                if (dn > 0.0) h = d * (len / dn);
            }
        }
        const GridFunction shifted = x0 + h;
        const double lhs = distance(op.eval_g(x, shifted), op.eval_g(y, shifted), ns_y);
        const double base = distance(op.eval_g(x, x0), op.eval_g(y, x0), ns_y);
        violation[j] = lhs - params.tau * base - params.ell * distance(x, y, ns_x);
    });
    const double worst = *std::max_element(violation.begin(), violation.end());
    return {worst, worst <= tolerance ? Verdict::BoundSatisfied : Verdict::BoundViolated};
}

// ---------------------------------------------------------------------------
// mixtures and MNC

std::vector<GridFunction> mixture_set(const GridFunction& y1, const GridFunction& y2, const MixtureMode& mode) {
    require_same_grid(y1, y2, "mixture_set");
    const std::size_t n = y1.size();
    const std::size_t dim = y1.dim();
    auto build = [&](const std::vector<std::uint8_t>& in_d) {
        std::vector<double> v(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = in_d[i] ? y1.value(i) : y2.value(i);
            std::copy(src.begin(), src.end(), v.begin() + static_cast<std::ptrdiff_t>(i * dim));
        }
        return GridFunction(y1.grid(), dim, std::move(v));
    };
    std::vector<GridFunction> out;
    if (mode.enumerate) {
        if (n > 20) fail(ErrorKind::InvalidArgument, "mixture_set: enumeration needs at most 20 cells");
        const std::size_t count = std::size_t{1} << n;
        out.reserve(count);
        std::vector<std::uint8_t> in_d(n);
        for (std::size_t bits = 0; bits < count; ++bits) {
            for (std::size_t i = 0; i < n; ++i) in_d[i] = static_cast<std::uint8_t>((bits >> i) & 1U);
            out.push_back(build(in_d));
        }
    } else {
        require(mode.count >= 1, "mixture_set: sample count must be positive");
        std::mt19937_64 rng(mode.seed);
        std::vector<std::uint8_t> in_d(n);
        out.reserve(mode.count);
        for (std::size_t k = 0; k < mode.count; ++k) {
            for (auto& b : in_d) b = static_cast<std::uint8_t>(rng() >> 63);
            out.push_back(build(in_d));
        }
    }
    return out;
}

namespace {

// Swap search on a packing: the point of the closest pair is replaced by the
// candidate farthest from the others while that raises the minimum distance
// (or keeps it and removes a closest pair). Returns the final minimum distance.
double polish_packing(const std::vector<GridFunction>& points, const Metric& dist, std::vector<std::size_t>& pack) {
    const std::size_t m = pack.size();
    const std::size_t N = points.size();
    std::vector<double> D(m * m, 0.0);
    auto fill = [&](std::size_t a) {
        for (std::size_t b = 0; b < m; ++b) {
            if (b != a) D[a * m + b] = D[b * m + a] = dist(points[pack[a]].values(), points[pack[b]].values());
        }
    };
    for (std::size_t a = 0; a < m; ++a) fill(a);
    auto summary = [&] {
        double lo = std::numeric_limits<double>::infinity();
        std::size_t ties = 0, a_min = 0, b_min = 1;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                const double d = D[a * m + b];
                if (d < lo) {
                    lo = d;
                    ties = 1;
                    a_min = a;
                    b_min = b;
                } else if (d == lo) {
                    ++ties;
                }
            }
        }
        return std::tuple{lo, ties, a_min, b_min};
    };

    const std::size_t max_swaps = 2 * m;
    std::vector<double> gain(N);
    for (std::size_t swap = 0; swap < max_swaps; ++swap) {
        const auto [lo, ties, a_min, b_min] = summary();
        bool moved = false;
        for (const std::size_t out : {a_min, b_min}) {
            // smallest distance among pairs that stay
            double rest = std::numeric_limits<double>::infinity();
            std::size_t rest_ties = 0;
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = a + 1; b < m; ++b) {
                    if (a == out || b == out) continue;
                    const double d = D[a * m + b];
                    if (d < rest) {
                        rest = d;
                        rest_ties = 1;
                    } else if (d == rest) {
                        ++rest_ties;
                    }
                }
            }
            parallel_for(N, [&](std::size_t i) {
                double g = std::numeric_limits<double>::infinity();
                for (std::size_t b = 0; b < m && g > lo; ++b) {
                    if (b != out) g = std::min(g, dist(points[i].values(), points[pack[b]].values()));
                }
                gain[i] = g;
            });
            std::size_t best = 0;
            for (std::size_t i = 1; i < N; ++i) {
                if (gain[i] > gain[best]) best = i;
            }
            const double new_min = std::min(gain[best], rest);
            const bool better = new_min > lo || (new_min == lo && gain[best] > lo && rest == lo && rest_ties < ties);
            if (better) {
                pack[out] = best;
                fill(out);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return std::get<0>(summary());
}

}  // namespace

MncEstimate mnc_estimate(const std::vector<GridFunction>& points, const NormSpec& ns, std::size_t k_max,
                         std::size_t polish_k) {
    require(!points.empty(), "mnc_estimate: empty point set");
    require(k_max >= 1, "mnc_estimate: k_max must be at least 1");
    const GridPtr& grid = points.front().grid();
    const std::size_t dim = points.front().dim();
    for (const auto& p : points) {
        if (!same_grid(p.grid(), grid)) fail(ErrorKind::GridMismatch, "mnc_estimate: points on different grids");
        require(p.dim() == dim, "mnc_estimate: points of different dimension");
    }
    const Metric dist(grid, dim, ns);
    const std::size_t N = points.size();
    const std::size_t len = grid->size() * dim;

    MncEstimate est;
    est.centers.push_back(0);
    std::vector<double> mind(N);
    std::vector<std::size_t> assign(N, 0);
    parallel_for(N, [&](std::size_t i) { mind[i] = dist(points[i].values(), points[0].values()); });

    double running = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= k_max; ++k) {
        // centers c_0..c_{k-1} are placed; the farthest point is the next one
        std::size_t far = 0;
        for (std::size_t i = 1; i < N; ++i) {
            if (mind[i] > mind[far]) far = i;
        }
        const double radius = mind[far];
        est.lower.push_back(0.5 * radius);

        double lloyd = radius;
        if (radius > 0.0) {
            // one Lloyd pass: cluster means as centers
            const std::size_t kc = est.centers.size();
            std::vector<double> sums(kc * len, 0.0);
            std::vector<std::size_t> counts(kc, 0);
            for (std::size_t i = 0; i < N; ++i) {
                const auto v = points[i].values();
                double* s = sums.data() + assign[i] * len;
                for (std::size_t c = 0; c < len; ++c) s[c] += v[c];
                ++counts[assign[i]];
            }
            for (std::size_t j = 0; j < kc; ++j) {
                for (std::size_t c = 0; c < len; ++c) sums[j * len + c] /= double(counts[j]);
            }
            std::vector<double> cover(N);
            parallel_for(N, [&](std::size_t i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < kc; ++j) {
                    best = std::min(best, dist(points[i].values(),
                                               std::span<const double>(sums.data() + j * len, len)));
                }
                cover[i] = best;
            });
            lloyd = *std::max_element(cover.begin(), cover.end());
        }
        running = std::min({running, radius, lloyd});
        est.upper.push_back(running);

        if (radius > 0.0) {
            est.centers.push_back(far);
            const std::size_t slot = est.centers.size() - 1;
            parallel_for(N, [&](std::size_t i) {
                const double d = dist(points[i].values(), points[far].values());
                if (d < mind[i]) {
                    mind[i] = d;
                    assign[i] = slot;
                }
            });
        }
    }
    if (polish_k >= 1 && polish_k <= k_max && est.centers.size() >= polish_k + 1) {
        std::vector<std::size_t> pack(est.centers.begin(), est.centers.begin() + std::ptrdiff_t(polish_k + 1));
        const double d = polish_packing(points, dist, pack);
        if (0.5 * d > est.lower[polish_k - 1]) est.lower[polish_k - 1] = 0.5 * d;
        est.packing = std::move(pack);
    }
    return est;
}

LocalMncRatio local_mnc_ratio(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                              const NormSpec& ns_y, const std::vector<double>& radii, int samples_per_radius,
                              std::size_t k_budget, std::uint64_t seed, std::size_t k_net) {
    require_decreasing(radii);
    require(samples_per_radius >= 2, "local_mnc_ratio: need at least 2 samples per radius");
    require(k_budget >= 1 && k_net >= 1, "local_mnc_ratio: k_budget and k_net must be positive");
    const std::size_t k_max = std::max(k_budget, k_net);
    const auto count = static_cast<std::size_t>(samples_per_radius);

    LocalMncRatio out;
    for (std::size_t idx = 0; idx < radii.size(); ++idx) {
        const double r = radii[idx];
        const BallSampler ball(x0, r, ns_x, sub_seed(seed, idx));
        const auto images = map_all(ball.points(count), [&](const GridFunction& x) { return op.eval_f(x); });
        const MncEstimate est = mnc_estimate(images, ns_y, k_max, k_budget);
        out.curve.parameter.push_back(r);
        out.curve.value.push_back(est.lower_at(k_budget) / r);
        out.upper.push_back(est.upper_at(k_net) / r);
    }

    const LinearOp L = op.d2g_matrix(x0, x0);
    const BallSampler unit(GridFunction::zero(x0.grid(), x0.dim()), 1.0, ns_x, sub_seed(seed, radii.size()));
    const auto images = map_all(unit.points(count), [&](const GridFunction& h) { return L.apply(h); });
    const MncEstimate est = mnc_estimate(images, ns_y, k_max, k_budget);
    out.scalar_L = est.lower_at(k_budget);
    out.scalar_L_upper = est.upper_at(k_net);
    return out;
}

DarboGrowth darbo_growth(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                         const NormSpec& ns_y, const std::vector<double>& radii, int trials, std::uint64_t seed,
                         double c, double tolerance, std::size_t k_net) {
    require(c >= 1.0, "darbo_growth: c must be at least 1");
    require(trials >= 2, "darbo_growth: need at least 2 trials");
    const LocalMncRatio mnc = local_mnc_ratio(op, x0, ns_x, ns_y, radii, trials, k_net, seed, k_net);

    DarboGrowth out;
    out.f_upper = *std::max_element(mnc.upper.begin(), mnc.upper.end());
    out.d2g_upper = mnc.scalar_L_upper;
    out.rhs = c * (out.f_upper + out.d2g_upper);

    const Metric dist(x0.grid(), x0.dim(), ns_y);
    std::vector<GridFunction> all_x, all_g;
    bool within = true;
    for (std::size_t idx = 0; idx < radii.size(); ++idx) {
        const double r = radii[idx];
        // same points as local_mnc_ratio used for this radius
        const BallSampler ball(x0, r, ns_x, sub_seed(seed, idx));
        auto xs = ball.points(static_cast<std::size_t>(trials));
        auto gs = map_all(xs, [&](const GridFunction& x) { return op.eval_g(x, x0); });
        const double lhs = max_pairwise(gs, dist) / (2.0 * r);
        out.lhs.parameter.push_back(r);
        out.lhs.value.push_back(lhs);
        if (!(lhs <= out.rhs + tolerance)) within = false;
        for (auto& x : xs) all_x.push_back(std::move(x));
        for (auto& g : gs) all_g.push_back(std::move(g));
    }

    // |G(x1,x0)(t) - G(x2,x0)(t)| <= 2 rhs max{|x1(t)-x0(t)|, |x2(t)-x0(t)|}
    const std::size_t n = x0.size();
    const std::size_t dim = x0.dim();
    auto diff = [dim](std::span<const double> a, std::span<const double> b, std::size_t i) {
        double s = 0.0;
        for (std::size_t c2 = 0; c2 < dim; ++c2) {
            const double d = a[i * dim + c2] - b[i * dim + c2];
            s += d * d;
        }
        return std::sqrt(s);
    };
    std::vector<double> row_excess(all_x.size(), -std::numeric_limits<double>::infinity());
    parallel_for(all_x.size(), [&](std::size_t p) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t q = p + 1; q < all_x.size(); ++q) {
            for (std::size_t i = 0; i < n; ++i) {
                const double lhs = diff(all_g[p].values(), all_g[q].values(), i);
                const double spread = std::max(diff(all_x[p].values(), x0.values(), i),
                                               diff(all_x[q].values(), x0.values(), i));
                worst = std::max(worst, lhs - 2.0 * out.rhs * spread);
            }
        }
        row_excess[p] = worst;
    });
    out.growth_excess = *std::max_element(row_excess.begin(), row_excess.end());
    out.verdict = within ? Verdict::BoundSatisfied : Verdict::BoundViolated;
    return out;
}

// ---------------------------------------------------------------------------
// compactness

std::vector<double> weighted_singular_values(const LinearOp& A) {
    const std::size_t n = A.size();
    const auto w = A.grid()->weights();
    const std::vector<double> dense = A.dense();
    Eigen::MatrixXd M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            M(Eigen::Index(i), Eigen::Index(j)) = std::sqrt(w[i]) * dense[i * n + j] / std::sqrt(w[j]);
        }
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

namespace {

// Removes the k leading principal directions (weighted L2) from the centered
// points. On a Hilbert space alpha is unchanged by quotienting out a
// finite-dimensional subspace, so what remains is the part that can witness
// non-compactness.
std::vector<GridFunction> remove_leading_directions(const std::vector<GridFunction>& ys, std::size_t k) {
    const GridPtr& grid = ys.front().grid();
    const std::size_t dim = ys.front().dim();
    const std::size_t n = grid->size();
    const std::size_t len = n * dim;
    const auto N = static_cast<Eigen::Index>(ys.size());
    const auto L = static_cast<Eigen::Index>(len);
    const auto w = grid->weights();

    Eigen::VectorXd sw(L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < dim; ++c) sw(Eigen::Index(i * dim + c)) = std::sqrt(w[i]);
    }
    Eigen::MatrixXd Z(N, L);
    for (Eigen::Index a = 0; a < N; ++a) {
        const auto v = ys[std::size_t(a)].values();
        for (Eigen::Index c = 0; c < L; ++c) Z(a, c) = v[std::size_t(c)] * sw(c);
    }
    const Eigen::RowVectorXd mean = Z.colwise().mean();
    Z.rowwise() -= mean;
    const Eigen::MatrixXd C = Z.transpose() * Z;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    const auto keep = std::min<Eigen::Index>(Eigen::Index(k), L);
    // eigenvalues ascending: the leading directions are the last columns
    const Eigen::MatrixXd V = eig.eigenvectors().rightCols(keep);
    const Eigen::MatrixXd R = Z - (Z * V) * V.transpose();

    std::vector<GridFunction> out;
    out.reserve(ys.size());
    for (Eigen::Index a = 0; a < N; ++a) {
        std::vector<double> v(len);
        for (Eigen::Index c = 0; c < L; ++c) v[std::size_t(c)] = R(a, c) / sw(c);
        out.emplace_back(grid, dim, std::move(v));
    }
    return out;
}

}  // namespace

Compactness compactness_probe(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                              const NormSpec& ns_y, double r, int trials, std::size_t k_budget, std::uint64_t seed,
                              double tolerance) {
    require_ball(r);
    require(trials >= 2, "compactness_probe: need at least 2 trials");
    require(k_budget >= 1, "compactness_probe: k_budget must be positive");
    const BallSampler ball(x0, r, ns_x, seed);
    const auto images = map_all(ball.points(static_cast<std::size_t>(trials)),
                                [&](const GridFunction& x) { return op.eval_f(x); });

    Compactness out{};
    out.raw_lower = mnc_estimate(images, ns_y, k_budget, k_budget).lower_at(k_budget);
    // orthogonal projection is nonexpansive only in the hilbert case
    const bool hilbert = ns_y.is_lp() && ns_y.p() == 2.0;
    out.alpha_lower = hilbert ? mnc_estimate(remove_leading_directions(images, k_budget), ns_y, k_budget, k_budget)
                                    .lower_at(k_budget)
                              : out.raw_lower;

    const std::vector<double> sv = weighted_singular_values(op.d2g_matrix(x0, x0));
    out.d2g_tail = k_budget < sv.size() ? sv[k_budget] : 0.0;
    out.verdict = (out.alpha_lower > tolerance && out.d2g_tail <= tolerance) ? Verdict::DegeneracyWitnessed
                                                                              : Verdict::NoWitnessFound;
    return out;
}

}  // namespace degenkit
