#pragma once

#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "funcspace.hpp"
#include "grid.hpp"

namespace degenkit {

// Kernel slots. k0(t,u) is the superposition kernel, k1(t,s,v) the Urysohn
// kernel and k2(t,s,u,v) the fully nonlinear kernel; absent slots contribute 0.
struct KernelSpec {
    std::optional<Expr> k0;
    std::optional<Expr> k1;
    std::optional<Expr> k2;

    static VarSet k0_vars() { return VarSet::of("tu"); }
    static VarSet k1_vars() { return VarSet::of("tsv"); }
    static VarSet k2_vars() { return VarSet::of("tsuv"); }

    // Parses the present slots under their signatures. Empty strings mean absent.
    static KernelSpec parse(const std::string& k0, const std::string& k1, const std::string& k2);

    bool empty() const noexcept { return !k0 && !k1 && !k2; }
    // Throws unless every present slot uses only its own variables.
    void validate() const;
};

// A cell x cell matrix plus a diagonal multiplier: (A h)_i = sum_j M_ij h_j + d_i h_i.
class LinearOp {
public:
    LinearOp(GridPtr grid, std::vector<double> matrix, std::vector<double> diagonal);
    static LinearOp zero(const GridPtr& grid);

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_->size(); }
    double entry(std::size_t i, std::size_t j) const { return matrix_[i * size() + j]; }
    double diagonal(std::size_t i) const { return diagonal_[i]; }
    const std::vector<double>& matrix() const noexcept { return matrix_; }
    const std::vector<double>& diagonal() const noexcept { return diagonal_; }

    GridFunction apply(const GridFunction& h) const;
    LinearOp operator-(const LinearOp& other) const;
    LinearOp operator+(const LinearOp& other) const;

    // Dense matrix of the operator, diagonal folded in.
    std::vector<double> dense() const;

private:
    GridPtr grid_;
    std::vector<double> matrix_;
    std::vector<double> diagonal_;
};

// Quadrature realization of G(x1, x2)(t) = k0(t, x1(t)) + ∫ k1(t, s, x2(s)) ds
// + ∫ k2(t, s, x1(t), x2(s)) ds on a grid, with F(x) = G(x, x).
class IntegralOperator {
public:
    IntegralOperator(KernelSpec kernels, GridPtr grid);

    const KernelSpec& kernels() const noexcept { return kernels_; }
    const GridPtr& grid() const noexcept { return grid_; }
    // Same kernels on another grid.
    IntegralOperator rebind(GridPtr grid) const;

    GridFunction eval_g(const GridFunction& x1, const GridFunction& x2) const;
    GridFunction eval_f(const GridFunction& x) const { return eval_g(x, x); }

    // Partial derivative in the second slot:
    // M_ij = w_j [D3 k1(t_i, t_j, x2_j) + D4 k2(t_i, t_j, x1_i, x2_j)].
    LinearOp d2g_matrix(const GridFunction& x1, const GridFunction& x2) const;
    // Directional derivative of F at x0.
    LinearOp gateaux_f_matrix(const GridFunction& x0) const;
    // DF(x0) - D2G(x0, x0): the only candidate for the Frechet derivative of G(., x0) at x0.
    LinearOp frechet_candidate_d1g(const GridFunction& x0) const;

private:
    struct Compiled {
        std::optional<CompiledExpr> code;
        std::string error;  // set when differentiation failed
        const CompiledExpr& get(const char* what) const;
    };

    void check_input(const GridFunction& x, const char* what) const;

    KernelSpec kernels_;
    GridPtr grid_;
    std::optional<CompiledExpr> k0_, k1_, k2_;
    Compiled dk0_du_, dk1_dv_, dk2_du_, dk2_dv_;
};

}  // namespace degenkit
