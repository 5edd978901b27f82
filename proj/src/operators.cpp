#include "operators.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace degenkit {

KernelSpec KernelSpec::parse(const std::string& k0, const std::string& k1, const std::string& k2) {
    KernelSpec spec;
    if (!k0.empty()) spec.k0 = parse_expr(k0, k0_vars());
    if (!k1.empty()) spec.k1 = parse_expr(k1, k1_vars());
    if (!k2.empty()) spec.k2 = parse_expr(k2, k2_vars());
    return spec;
}

void KernelSpec::validate() const {
    if (empty()) fail(ErrorKind::InvalidArgument, "at least one of k0, k1, k2 is required");
    auto check = [](const std::optional<Expr>& e, VarSet allowed, const char* slot) {
        if (e && !e->variables().subset_of(allowed)) {
            fail(ErrorKind::InvalidArgument, std::string("kernel ") + slot + " uses variables outside " +
                                                 allowed.to_string());
        }
    };
    check(k0, k0_vars(), "k0");
    check(k1, k1_vars(), "k1");
    check(k2, k2_vars(), "k2");
}

// ---------------------------------------------------------------------------
// LinearOp

LinearOp::LinearOp(GridPtr grid, std::vector<double> matrix, std::vector<double> diagonal)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), diagonal_(std::move(diagonal)) {
    require(grid_ != nullptr, "linear op: null grid");
    const std::size_t n = grid_->size();
    require(matrix_.size() == n * n && diagonal_.size() == n, "linear op: shape does not match grid");
    for (double v : matrix_) {
        if (!std::isfinite(v)) fail(ErrorKind::Numeric, "linear op: non-finite matrix entry");
    }
    for (double v : diagonal_) {
        if (!std::isfinite(v)) fail(ErrorKind::Numeric, "linear op: non-finite diagonal entry");
    }
}

LinearOp LinearOp::zero(const GridPtr& grid) {
    const std::size_t n = grid->size();
    return LinearOp(grid, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0));
}

GridFunction LinearOp::apply(const GridFunction& h) const {
    if (!same_grid(h.grid(), grid_)) fail(ErrorKind::GridMismatch, "linear op: grid mismatch");
    require(h.dim() == 1, "linear op: scalar functions only");
    const std::size_t n = size();
    std::vector<double> out(n);
    const auto hv = h.values();
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = matrix_.data() + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * hv[j];
        out[i] = s + diagonal_[i] * hv[i];
    }
    return GridFunction::scalar(grid_, std::move(out));
}

LinearOp LinearOp::operator-(const LinearOp& other) const {
    if (!same_grid(grid_, other.grid_)) fail(ErrorKind::GridMismatch, "linear op: grid mismatch");
    std::vector<double> m(matrix_), d(diagonal_);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] -= other.matrix_[k];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= other.diagonal_[k];
    return LinearOp(grid_, std::move(m), std::move(d));
}

LinearOp LinearOp::operator+(const LinearOp& other) const {
    if (!same_grid(grid_, other.grid_)) fail(ErrorKind::GridMismatch, "linear op: grid mismatch");
    std::vector<double> m(matrix_), d(diagonal_);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += other.matrix_[k];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += other.diagonal_[k];
    return LinearOp(grid_, std::move(m), std::move(d));
}

std::vector<double> LinearOp::dense() const {
    std::vector<double> m(matrix_);
    for (std::size_t i = 0; i < size(); ++i) m[i * size() + i] += diagonal_[i];
    return m;
}

// ---------------------------------------------------------------------------
// IntegralOperator

const CompiledExpr& IntegralOperator::Compiled::get(const char* what) const {
    if (!code) fail(ErrorKind::Domain, std::string(what) + ": " + error);
    return *code;
}

IntegralOperator::IntegralOperator(KernelSpec kernels, GridPtr grid)
    : kernels_(std::move(kernels)), grid_(std::move(grid)) {
    require(grid_ != nullptr, "operator: null grid");
    kernels_.validate();
    auto derive = [](const std::optional<Expr>& e, Var var) {
        Compiled c;
        if (!e) {
            c.code = CompiledExpr(Expr::constant(0.0));
            return c;
        }
        try {
            c.code = CompiledExpr(diff_expr(*e, var));
        } catch (const Error& err) {
            c.error = err.what();
        }
        return c;
    };
    if (kernels_.k0) k0_ = CompiledExpr(*kernels_.k0);
    if (kernels_.k1) k1_ = CompiledExpr(*kernels_.k1);
    if (kernels_.k2) k2_ = CompiledExpr(*kernels_.k2);
    dk0_du_ = derive(kernels_.k0, Var::u);
    dk1_dv_ = derive(kernels_.k1, Var::v);
    dk2_du_ = derive(kernels_.k2, Var::u);
    dk2_dv_ = derive(kernels_.k2, Var::v);
}

IntegralOperator IntegralOperator::rebind(GridPtr grid) const { return IntegralOperator(kernels_, std::move(grid)); }

void IntegralOperator::check_input(const GridFunction& x, const char* what) const {
    if (!same_grid(x.grid(), grid_)) fail(ErrorKind::GridMismatch, std::string(what) + ": not on the operator grid");
    if (x.dim() != 1) fail(ErrorKind::InvalidArgument, std::string(what) + ": kernels act on scalar functions");
}

namespace {

[[noreturn]] void kernel_failure(const char* slot, std::size_t i, std::size_t j, const Error& err) {
    std::ostringstream os;
    os << "kernel " << slot << " failed at cell pair (" << i << ", " << j << "): " << err.what();
    throw Error(err.kind(), os.str());
}

}  // namespace

GridFunction IntegralOperator::eval_g(const GridFunction& x1, const GridFunction& x2) const {
    check_input(x1, "eval_g x1");
    check_input(x2, "eval_g x2");
    const std::size_t n = grid_->size();
    const auto w = grid_->weights();
    const auto cells = grid_->cells();
    std::vector<double> out(n, 0.0);

    parallel_for(n, [&](std::size_t i) {
        const double ti = cells[i].representative;
        const double ui = x1[i];
        double local = 0.0;
        if (k0_) {
            try {
                local = (*k0_)({ti, 0.0, ui, 0.0});
            } catch (const Error& err) {
                kernel_failure("k0", i, i, err);
            }
        }
        double integral = 0.0;
        if (k1_ || k2_) {
            for (std::size_t j = 0; j < n; ++j) {
                const double sj = cells[j].representative;
                const double vj = x2[j];
                double k = 0.0;
                if (k1_) {
                    try {
                        k += (*k1_)({ti, sj, 0.0, vj});
                    } catch (const Error& err) {
                        kernel_failure("k1", i, j, err);
                    }
                }
                if (k2_) {
                    try {
                        k += (*k2_)({ti, sj, ui, vj});
                    } catch (const Error& err) {
                        kernel_failure("k2", i, j, err);
                    }
                }
                integral += w[j] * k;
            }
        }
        out[i] = local + integral;
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(out[i])) {
            fail(ErrorKind::Numeric, "eval_g: non-finite output at cell " + std::to_string(i));
        }
    }
    return GridFunction::scalar(grid_, std::move(out));
}

LinearOp IntegralOperator::d2g_matrix(const GridFunction& x1, const GridFunction& x2) const {
    check_input(x1, "d2g_matrix x1");
    check_input(x2, "d2g_matrix x2");
    const std::size_t n = grid_->size();
    const auto w = grid_->weights();
    const auto cells = grid_->cells();
    std::vector<double> m(n * n, 0.0);
    if (kernels_.k1 || kernels_.k2) {
        const CompiledExpr& d1 = dk1_dv_.get("D3 k1");
        const CompiledExpr& d2 = dk2_dv_.get("D4 k2");
        parallel_for(n, [&](std::size_t i) {
            const double ti = cells[i].representative;
            for (std::size_t j = 0; j < n; ++j) {
                const std::array<double, kVarCount> at{ti, cells[j].representative, x1[i], x2[j]};
                try {
                    m[i * n + j] = w[j] * (d1(at) + d2(at));
                } catch (const Error& err) {
                    kernel_failure("D4 k2 / D3 k1", i, j, err);
                }
            }
        });
    }
    return LinearOp(grid_, std::move(m), std::vector<double>(n, 0.0));
}

LinearOp IntegralOperator::gateaux_f_matrix(const GridFunction& x0) const {
    check_input(x0, "gateaux_f_matrix");
    const std::size_t n = grid_->size();
    const auto w = grid_->weights();
    const auto cells = grid_->cells();
    const CompiledExpr& du0 = dk0_du_.get("D2 k0");
    const CompiledExpr& dv1 = dk1_dv_.get("D3 k1");
    const CompiledExpr& du2 = dk2_du_.get("D3 k2");
    const CompiledExpr& dv2 = dk2_dv_.get("D4 k2");
    const bool integral = kernels_.k1 || kernels_.k2;

    std::vector<double> m(n * n, 0.0);
    std::vector<double> d(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const double ti = cells[i].representative;
        double diag = 0.0;
        try {
            diag = du0({ti, 0.0, x0[i], 0.0});
        } catch (const Error& err) {
            kernel_failure("D2 k0", i, i, err);
        }
        if (integral) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::array<double, kVarCount> at{ti, cells[j].representative, x0[i], x0[j]};
                try {
                    diag += w[j] * du2(at);
                    m[i * n + j] = w[j] * (dv1(at) + dv2(at));
                } catch (const Error& err) {
                    kernel_failure("kernel derivative", i, j, err);
                }
            }
        }
        d[i] = diag;
    });
    return LinearOp(grid_, std::move(m), std::move(d));
}

LinearOp IntegralOperator::frechet_candidate_d1g(const GridFunction& x0) const {
    return gateaux_f_matrix(x0) - d2g_matrix(x0, x0);
}

}  // namespace degenkit
