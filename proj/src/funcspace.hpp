#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "expr.hpp"
#include "grid.hpp"

namespace degenkit {

// Vector-valued step function: one value in R^dim per grid cell.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::size_t dim, std::vector<double> values);

    static GridFunction zero(const GridPtr& grid, std::size_t dim = 1);
    static GridFunction constant(const GridPtr& grid, double value);
    static GridFunction scalar(const GridPtr& grid, std::vector<double> values);
    // Samples f at every cell representative.
    static GridFunction sample(const GridPtr& grid, const std::function<double(double)>& f);
    // value * indicator(mask)
    static GridFunction indicator(const SubsetMask& mask, double value = 1.0);

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return grid_->size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> value(std::size_t cell) const {
        return std::span<const double>(values_).subspan(cell * dim_, dim_);
    }
    // Scalar access; only valid for dim == 1.
    double operator[](std::size_t cell) const { return values_[cell]; }
    // Euclidean norm of the value at a cell.
    double magnitude(std::size_t cell) const;
    std::vector<double> magnitudes() const;

    GridFunction transport(const Refinement& ref) const;

    GridFunction operator+(const GridFunction& other) const;
    GridFunction operator-(const GridFunction& other) const;
    GridFunction operator*(double s) const;
    // Pointwise multiplication by a scalar function.
    GridFunction scaled_by(std::span<const double> factors) const;

    bool operator==(const GridFunction& other) const;

private:
    GridPtr grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* context);

// ---------------------------------------------------------------------------
// Generalized Young function Phi(t, u) >= 0 with Phi(t, 0) = 0, convex and
// nondecreasing in u. Validated on a 32x32 sample at construction. Phi may
// return +infinity.
class YoungFunction {
public:
    using Callable = std::function<double(double t, double u)>;

    // Expression in the variables t and u.
    static std::shared_ptr<const YoungFunction> from_expr(const Expr& phi, double t_max = 1.0);
    static std::shared_ptr<const YoungFunction> from_text(const std::string& text, double t_max = 1.0);
    static std::shared_ptr<const YoungFunction> from_callable(Callable phi, std::string description,
                                                              double t_max = 1.0);
    // u^p
    static std::shared_ptr<const YoungFunction> power(double p);
    // u^p(t) for finite p(t); 0 for u <= 1 and +infinity for u > 1 where p(t) is infinite.
    static std::shared_ptr<const YoungFunction> variable_exponent(std::function<double(double)> p,
                                                                  std::string description, double t_max = 1.0);

    double operator()(double t, double u) const { return phi_(t, u); }
    const std::string& description() const noexcept { return description_; }

private:
    YoungFunction(Callable phi, std::string description, double t_max);
    void validate() const;

    Callable phi_;
    std::string description_;
    double t_max_;
};

using YoungPtr = std::shared_ptr<const YoungFunction>;

struct LpNorm {
    double p = 2.0;  // +infinity allowed
};

struct OrliczNorm {
    YoungPtr phi;
};

class NormSpec {
public:
    static NormSpec lp(double p);
    static NormSpec linf();
    static NormSpec orlicz(YoungPtr phi);

    bool is_lp() const noexcept { return std::holds_alternative<LpNorm>(variant_); }
    double p() const;  // Lp only
    const YoungFunction& young() const;  // Orlicz only
    std::string describe() const;

    // Phi(t, u) for this norm (u^p for finite p).
    double phi(double t, double u) const;

    const std::variant<LpNorm, OrliczNorm>& variant() const noexcept { return variant_; }

private:
    explicit NormSpec(std::variant<LpNorm, OrliczNorm> v) : variant_(std::move(v)) {}
    std::variant<LpNorm, OrliczNorm> variant_;
};

// Lp: (sum_i w_i |v_i|^p)^(1/p), max |v_i| for p = inf.
// Orlicz-Musielak: Luxemburg norm inf{lambda > 0 : sum_i w_i Phi(t_i, |v_i|/lambda) <= 1}
// by bracketing and bisection to relative width 1e-12.
double norm(const GridFunction& x, const NormSpec& ns);
double distance(const GridFunction& a, const GridFunction& b, const NormSpec& ns);
// sum_i w_i Phi(t_i, |v_i| / lambda), saturating at +infinity.
double modular(const GridFunction& x, const YoungFunction& phi, double lambda);

// P_D x: x on the members of `mask`, zero elsewhere.
GridFunction project(const GridFunction& x, const SubsetMask& mask);
// Cells where x is nonzero.
SubsetMask support(const GridFunction& x);

struct ShrinkResult {
    Refinement refinement;  // original grid -> grid of `mask`
    SubsetMask mask;
    GridFunction x;         // x transported to the refined grid
    double achieved_norm;   // ||P_D x||
};

// Finds a positive-measure D inside t_mask with ||P_D x|| < eps by halving a
// member cell of t_mask ∩ supp x at most `max_refine` times.
ShrinkResult shrink_support(const GridFunction& x, const SubsetMask& t_mask, double eps, const NormSpec& ns,
                            int max_refine);

// Step function y with |x(t_i) - y(t_i)| <= eps |x(t_i)| for every cell:
// magnitudes are banded dyadically and snapped to an (eps * band floor)-net
// of observed values. Zeros are preserved.
GridFunction simple_approx(const GridFunction& x, double eps);

struct VpairStep {
    SubsetMask mask;
    GridFunction x_n;  // P_{D_n} x
    double measure;
    double x_norm;
    double y_norm;
    double ratio;
};

struct VpairWitness {
    long long n_factor;                  // smallest N with T_N of positive measure
    std::optional<double> embedding;     // embedding constant of X into Y when known
    std::optional<double> bound;         // n_factor * embedding
    std::vector<VpairStep> steps;
};

// Smallest C with ||f||_X <= C ||f||_Y for all f, when it has a closed form:
// identical norms, or Lp and Lq with p <= q on a space of finite measure.
std::optional<double> embedding_constant(const NormSpec& ns_x, const NormSpec& ns_y, double total_measure);

VpairWitness vpair_witness(const GridFunction& x, const GridFunction& y, const SubsetMask& t_mask,
                           const NormSpec& ns_x, const NormSpec& ns_y, int steps);

enum class CheckVerdict { Pass, Fail };

const char* to_string(CheckVerdict v) noexcept;

struct AverageStabilityResult {
    double worst_ratio;
    CheckVerdict verdict;
    std::size_t partition_cells;  // cells after the band refinement
};

// Monte Carlo check of c-average-stability for x = sum (a1+a2)/2 chi_{D_n}.
AverageStabilityResult average_stability_check(std::span<const double> a1, std::span<const double> a2,
                                               const GridPtr& base, const NormSpec& ns, double c, double eps,
                                               int trials, std::uint64_t seed);

struct MeanValueResult {
    double lhs;
    double bound;
    double derivative_bound;
    CheckVerdict verdict;
};

// samples[i] = phi(a + i * step). Checks ||phi(b) - phi(a)|| <= M (b - a) with
// M the largest central-difference derivative norm over interior samples.
MeanValueResult mean_value_check(std::span<const std::vector<double>> samples, double step);

}  // namespace degenkit
