#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace degenkit {

// Kernel variables. `t` and `s` are measure-space points, `u` is the local
// state x(t) and `v` the integrated state x(s).
enum class Var : std::uint8_t { t = 0, s = 1, u = 2, v = 3 };

inline constexpr std::size_t kVarCount = 4;

const char* var_name(Var v) noexcept;

class VarSet {
public:
    constexpr VarSet() = default;
    // Builds a set from a string of variable letters, e.g. "tsuv".
    static VarSet of(std::string_view letters);

    constexpr bool contains(Var v) const noexcept { return (bits_ >> static_cast<int>(v)) & 1U; }
    constexpr VarSet with(Var v) const noexcept {
        VarSet out = *this;
        out.bits_ |= static_cast<std::uint8_t>(1U << static_cast<int>(v));
        return out;
    }
    constexpr VarSet unite(VarSet other) const noexcept {
        VarSet out;
        out.bits_ = static_cast<std::uint8_t>(bits_ | other.bits_);
        return out;
    }
    constexpr bool subset_of(VarSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    std::string to_string() const;

    friend constexpr bool operator==(VarSet, VarSet) = default;

private:
    std::uint8_t bits_ = 0;
};

enum class Op : std::uint8_t { Const, Variable, Neg, Sin, Cos, Exp, Abs, Log, Add, Sub, Mul, Div, Pow };

// Immutable expression tree. Construction goes through the folding factory
// functions, so every Expr is already constant-folded.
class Expr {
public:
    static Expr constant(double value);
    static Expr variable(Var v);
    static Expr unary(Op op, Expr arg);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    Op op() const noexcept;
    double value() const noexcept;  // Const only
    Var var() const noexcept;       // Variable only
    const Expr& arg(std::size_t i) const;
    std::size_t arity() const noexcept;

    bool is_constant() const noexcept { return op() == Op::Const; }
    bool is_constant(double v) const noexcept { return op() == Op::Const && value() == v; }
    bool uses(Var v) const noexcept;
    VarSet variables() const noexcept;
    std::size_t node_count() const noexcept;

    bool structurally_equal(const Expr& other) const noexcept;
    // Fully parenthesized text that parses back to the same tree.
    std::string to_string() const;

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

// Grammar: sums/differences of products/quotients of (possibly negated)
// powers; `^` binds tighter than unary minus and is right-associative.
// Functions: sin cos exp abs pow(a, b); constant: pi.
Expr parse_expr(std::string_view text, VarSet allowed);

// Tree-walking evaluation against named bindings. Throws on a missing binding,
// division by zero, a pow domain violation, or a NaN result.
double eval_expr(const Expr& e, const std::map<std::string, double>& bindings);

// Symbolic partial derivative with constant folding.
Expr diff_expr(const Expr& e, Var var);

// Flat postfix program for fast repeated evaluation in quadrature loops.
// Same semantics and error behavior as eval_expr.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    double operator()(const std::array<double, kVarCount>& vars) const;
    bool valid() const noexcept { return !code_.empty(); }

private:
    struct Instr {
        Op op;
        std::uint8_t var;
        double value;
    };
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

}  // namespace degenkit
