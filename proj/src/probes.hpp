#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "funcspace.hpp"
#include "grid.hpp"
#include "operators.hpp"

namespace degenkit {

enum class Verdict { DegeneracyWitnessed, NoWitnessFound, BoundSatisfied, BoundViolated };

const char* to_string(Verdict v) noexcept;

// (parameter, value) pairs with strictly decreasing parameters.
struct RatioCurve {
    std::vector<double> parameter;
    std::vector<double> value;
};

// ---------------------------------------------------------------------------
// Sampling B_r(center). Perturbations come in antithetic pairs: point 2j is
// center + h_j and point 2j+1 is center - h_j. h_j cycles through three kinds:
//   0: gaussian direction scaled to a radius uniform in [0, r]
//   1: r * chi_cell / ||chi_cell|| for a random cell
//   2: a * chi_D, D a random union of dyadic intervals of [0, total] at a fixed
//      level, with ||a chi_D|| = r. Drawn from its own stream so it does not
//      depend on the grid.
class BallSampler {
public:
    BallSampler(GridFunction center, double r, NormSpec ns, std::uint64_t seed, int dyadic_level = 7);

    GridFunction perturbation(std::size_t j) const;
    GridFunction point(std::size_t i) const;
    std::vector<GridFunction> points(std::size_t count) const;

    double radius() const noexcept { return r_; }
    const GridFunction& center() const noexcept { return center_; }

private:
    GridFunction center_;
    double r_;
    NormSpec ns_;
    std::uint64_t seed_;
    int level_;
};

// ---------------------------------------------------------------------------

struct FrechetResidual {
    RatioCurve curve;  // parameter = mes D_n, value = residual ratio
    double floor;
    Verdict verdict;
    std::size_t grid_cells;  // cells of the grid the curve was computed on
};

FrechetResidual frechet_residual(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                                 const NormSpec& ns_y, double amplitude, int levels, double floor = 1e-3);

// Lower estimate of the local Lipschitz constant of F on B_r(x0).
double lipschitz_local(const IntegralOperator& op, const GridFunction& x0, double r, const NormSpec& ns_x,
                       const NormSpec& ns_y, int trials, std::uint64_t seed);

struct PointwiseExcess {
    double max_excess;
    std::size_t cell;
};

PointwiseExcess lipschitz_pointwise(const IntegralOperator& op, const GridFunction& y1, const GridFunction& y2,
                                    const GridFunction& x0, double L1);

struct LipschitzParams {
    double tau = 0.0;
    double ell = 0.0;
    double L = 0.0;
    double L2 = 0.0;
    // l + tau (L + L2), or l when tau = 0
    double L1() const noexcept { return tau == 0.0 ? ell : ell + tau * (L + L2); }
};

struct TransferCheck {
    double max_violation;
    Verdict verdict;
};

TransferCheck lipschitz_transfer(const IntegralOperator& op, const GridFunction& x0, const LipschitzParams& params,
                                 double r, int trials, std::uint64_t seed, const NormSpec& ns_x, const NormSpec& ns_y,
                                 double tolerance = 1e-9);

// P_D y1 + P_{complement} y2 over cell masks D. Enumeration orders D by the
// binary number with bit i set when cell i is in D.
struct MixtureMode {
    bool enumerate = true;
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

std::vector<GridFunction> mixture_set(const GridFunction& y1, const GridFunction& y2, const MixtureMode& mode);

struct MncEstimate {
    std::vector<double> upper;  // upper[k-1]: cost of a k-point net, k = 1..k_max
    std::vector<double> lower;  // lower[k-1]: half the packing distance of k+1 points
    std::vector<std::size_t> centers;  // farthest-first order, up to k_max + 1 indices
    std::vector<std::size_t> packing;  // k+1 points certifying lower(polish_k), when polishing ran
    double upper_at(std::size_t k) const { return upper.at(k - 1); }
    double lower_at(std::size_t k) const { return lower.at(k - 1); }
};

// polish_k > 0 additionally improves the packing for that k by swapping points
// in and out (bounded work); lower(polish_k) is then the better of the two.
MncEstimate mnc_estimate(const std::vector<GridFunction>& points, const NormSpec& ns, std::size_t k_max,
                         std::size_t polish_k = 0);

struct LocalMncRatio {
    RatioCurve curve;            // lower(k_budget) / r
    std::vector<double> upper;   // upper(k_net) / r per radius
    double scalar_L;             // lower(k_budget) of L(B_1(0)), L = D2G(x0, x0)
    double scalar_L_upper;       // upper(k_net) of the same set
};

LocalMncRatio local_mnc_ratio(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                              const NormSpec& ns_y, const std::vector<double>& radii, int samples_per_radius,
                              std::size_t k_budget, std::uint64_t seed, std::size_t k_net = 1);

struct DarboGrowth {
    RatioCurve lhs;        // sampled diam(G(B_r(x0), x0)) / (2r)
    double f_upper;        // upper estimate of [F]_{x0}
    double d2g_upper;      // upper estimate of [D2G(x0,x0)]_0
    double rhs;            // c (f_upper + d2g_upper)
    double growth_excess;  // max pointwise excess over the growth bound
    Verdict verdict;
};

DarboGrowth darbo_growth(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                         const NormSpec& ns_y, const std::vector<double>& radii, int trials, std::uint64_t seed,
                         double c, double tolerance = 0.05, std::size_t k_net = 1);

struct Compactness {
    double alpha_lower;
    double raw_lower;   // lower(k_budget) before removing the leading directions
    double d2g_tail;    // singular value k_budget + 1 of D2G(x0, x0) in weighted L2
    Verdict verdict;
};

Compactness compactness_probe(const IntegralOperator& op, const GridFunction& x0, const NormSpec& ns_x,
                              const NormSpec& ns_y, double r, int trials, std::size_t k_budget, std::uint64_t seed,
                              double tolerance = 1e-3);

// Singular values of A in the weighted L2 geometry, descending.
std::vector<double> weighted_singular_values(const LinearOp& A);

}  // namespace degenkit
