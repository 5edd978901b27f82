#include "expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace degenkit {

struct Expr::Node {
    Op op = Op::Const;
    Var var = Var::t;
    double value = 0.0;
    std::vector<Expr> args;
    VarSet vars;
    std::size_t size = 1;
};

namespace {

const char* const kVarNames[kVarCount] = {"t", "s", "u", "v"};

bool is_unary(Op op) {
    return op == Op::Neg || op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Abs || op == Op::Log;
}

bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

[[noreturn]] void domain_error(const std::string& what) { fail(ErrorKind::Domain, what); }

double checked(double r, const char* what) {
    if (std::isnan(r)) domain_error(std::string("NaN produced by ") + what);
    return r;
}

double apply_pow(double base, double exponent) {
    if (base == 0.0 && exponent < 0.0) domain_error("pow: zero base with negative exponent");
    if (base < 0.0 && exponent != std::floor(exponent)) {
        domain_error("pow: negative base with non-integer exponent");
    }
    return checked(std::pow(base, exponent), "pow");
}

double apply_unary(Op op, double a) {
    switch (op) {
        case Op::Neg: return -a;
        case Op::Sin: return checked(std::sin(a), "sin");
        case Op::Cos: return checked(std::cos(a), "cos");
        case Op::Exp: return checked(std::exp(a), "exp");
        case Op::Abs: return std::abs(a);
        case Op::Log:
            if (a <= 0.0) domain_error("log: non-positive argument");
            return std::log(a);
        default: break;
    }
    domain_error("bad unary op");
}

double apply_binary(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return checked(a + b, "+");
        case Op::Sub: return checked(a - b, "-");
        case Op::Mul: return checked(a * b, "*");
        case Op::Div:
            if (b == 0.0) domain_error("division by zero");
            return checked(a / b, "/");
        case Op::Pow: return apply_pow(a, b);
        default: break;
    }
    domain_error("bad binary op");
}

const char* op_symbol(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Pow: return "^";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Abs: return "abs";
        default: return "?";
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

const char* var_name(Var v) noexcept { return kVarNames[static_cast<int>(v)]; }

VarSet VarSet::of(std::string_view letters) {
    VarSet out;
    for (char c : letters) {
        bool found = false;
        for (std::size_t i = 0; i < kVarCount; ++i) {
            if (kVarNames[i][0] == c) {
                out = out.with(static_cast<Var>(i));
                found = true;
            }
        }
        require(found || c == ',' || c == ' ', std::string("unknown kernel variable '") + c + "'");
    }
    return out;
}

std::string VarSet::to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < kVarCount; ++i) {
        if (!contains(static_cast<Var>(i))) continue;
        if (out.size() > 1) out += ",";
        out += kVarNames[i];
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// construction with folding

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Variable;
    n->var = v;
    n->vars = VarSet{}.with(v);
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr a) {
    require(is_unary(op), "Expr::unary: not a unary op");
    if (a.is_constant()) {
        if (op == Op::Neg) return constant(-a.value());
        try {
            const double f = apply_unary(op, a.value());
            if (std::isfinite(f)) return constant(f);
        } catch (const Error&) {
        }
    }
    if (op == Op::Neg && a.op() == Op::Neg) return a.arg(0);
    auto n = std::make_shared<Node>();
    n->op = op;
    n->vars = a.variables();
    n->size = 1 + a.node_count();
    n->args.push_back(std::move(a));
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    require(is_binary(op), "Expr::binary: not a binary op");
    if (a.is_constant() && b.is_constant()) {
        try {
            const double f = apply_binary(op, a.value(), b.value());
            if (std::isfinite(f)) return constant(f);
        } catch (const Error&) {
            // leave e.g. 1/0 unfolded; evaluation reports the domain error
        }
    }
    switch (op) {
        case Op::Add:
            if (a.is_constant(0.0)) return b;
            if (b.is_constant(0.0)) return a;
            break;
        case Op::Sub:
            if (b.is_constant(0.0)) return a;
            if (a.is_constant(0.0)) return unary(Op::Neg, std::move(b));
            break;
        case Op::Mul:
            if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
            if (a.is_constant(1.0)) return b;
            if (b.is_constant(1.0)) return a;
            if (a.is_constant(-1.0)) return unary(Op::Neg, std::move(b));
            if (b.is_constant(-1.0)) return unary(Op::Neg, std::move(a));
            break;
        case Op::Div:
            if (b.is_constant(1.0)) return a;
            break;
        case Op::Pow:
            if (b.is_constant(1.0)) return a;
            if (b.is_constant(0.0)) return constant(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->vars = a.variables().unite(b.variables());
    n->size = 1 + a.node_count() + b.node_count();
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
Var Expr::var() const noexcept { return node_->var; }
const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }
std::size_t Expr::arity() const noexcept { return node_->args.size(); }
bool Expr::uses(Var v) const noexcept { return node_->vars.contains(v); }
VarSet Expr::variables() const noexcept { return node_->vars; }
std::size_t Expr::node_count() const noexcept { return node_->size; }

bool Expr::structurally_equal(const Expr& other) const noexcept {
    if (node_ == other.node_) return true;
    if (op() != other.op() || arity() != other.arity()) return false;
    if (op() == Op::Const) {
        return value() == other.value() || (std::isnan(value()) && std::isnan(other.value()));
    }
    if (op() == Op::Variable) return var() == other.var();
    for (std::size_t i = 0; i < arity(); ++i) {
        if (!arg(i).structurally_equal(other.arg(i))) return false;
    }
    return true;
}

std::string Expr::to_string() const {
    switch (op()) {
        case Op::Const: {
            const double v = value();
            return v < 0.0 || (v == 0.0 && std::signbit(v)) ? "(-" + format_double(-v) + ")" : format_double(v);
        }
        case Op::Variable: return var_name(var());
        case Op::Neg: return "(-" + arg(0).to_string() + ")";
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Log:
        case Op::Abs: return std::string(op_symbol(op())) + "(" + arg(0).to_string() + ")";
        default:
            return "(" + arg(0).to_string() + " " + op_symbol(op()) + " " + arg(1).to_string() + ")";
    }
}

Expr operator+(Expr a, Expr b) { return Expr::binary(Op::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Op::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Op::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Op::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::unary(Op::Neg, std::move(a)); }

// ---------------------------------------------------------------------------
// parser

namespace {

class Parser {
public:
    Parser(std::string_view text, VarSet allowed) : text_(text), allowed_(allowed) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + parse_product();
            } else if (accept('-')) {
                lhs = lhs - parse_product();
            } else {
                return lhs;
            }
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * parse_unary();
            } else if (accept('/')) {
                lhs = lhs / parse_unary();
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        if (accept('-')) return -parse_unary();
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) return Expr::binary(Op::Pow, std::move(base), parse_unary());
        return base;
    }

    Expr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            throw ParseError("malformed number", start);
        }
        return Expr::constant(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(text_.substr(start, pos_ - start));

        static const std::pair<const char*, Op> kFunctions[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"abs", Op::Abs}, {"log", Op::Log}};
        for (const auto& [fname, fop] : kFunctions) {
            if (name == fname) {
                expect('(');
                Expr a = parse_sum();
                expect(')');
                return Expr::unary(fop, std::move(a));
            }
        }
        if (name == "pow") {
            expect('(');
            Expr a = parse_sum();
            expect(',');
            Expr b = parse_sum();
            expect(')');
            return Expr::binary(Op::Pow, std::move(a), std::move(b));
        }
        if (name == "pi") return Expr::constant(std::numbers::pi);

        for (std::size_t i = 0; i < kVarCount; ++i) {
            if (name == kVarNames[i] && allowed_.contains(static_cast<Var>(i))) {
                return Expr::variable(static_cast<Var>(i));
            }
        }
        throw ParseError("undeclared variable '" + name + "' (allowed: " + allowed_.to_string() + ")", start);
    }

    std::string_view text_;
    VarSet allowed_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, VarSet allowed) { return Parser(text, allowed).parse(); }

// ---------------------------------------------------------------------------
// evaluation

namespace {

double eval_tree(const Expr& e, const std::array<double, kVarCount>& vals, VarSet bound) {
    switch (e.op()) {
        case Op::Const: return e.value();
        case Op::Variable:
            if (!bound.contains(e.var())) {
                fail(ErrorKind::InvalidArgument, std::string("missing binding for '") + var_name(e.var()) + "'");
            }
            return vals[static_cast<int>(e.var())];
        case Op::Neg:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Log:
        case Op::Abs: return apply_unary(e.op(), eval_tree(e.arg(0), vals, bound));
        default: {
            const double a = eval_tree(e.arg(0), vals, bound);
            const double b = eval_tree(e.arg(1), vals, bound);
            return apply_binary(e.op(), a, b);
        }
    }
}

}  // namespace

double eval_expr(const Expr& e, const std::map<std::string, double>& bindings) {
    std::array<double, kVarCount> vals{};
    VarSet bound;
    for (const auto& [name, value] : bindings) {
        for (std::size_t i = 0; i < kVarCount; ++i) {
            if (name == kVarNames[i]) {
                vals[i] = value;
                bound = bound.with(static_cast<Var>(i));
            }
        }
    }
    return eval_tree(e, vals, bound);
}

CompiledExpr::CompiledExpr(const Expr& e) {
    std::size_t depth = 0;
    auto emit = [&](auto&& self, const Expr& x) -> void {
        for (std::size_t i = 0; i < x.arity(); ++i) self(self, x.arg(i));
        Instr ins{x.op(), 0, 0.0};
        if (x.op() == Op::Const) ins.value = x.value();
        if (x.op() == Op::Variable) ins.var = static_cast<std::uint8_t>(x.var());
        code_.push_back(ins);
        if (x.arity() == 0) {
            ++depth;
        } else if (x.arity() == 2) {
            --depth;
        }
        max_depth_ = std::max(max_depth_, depth);
    };
    emit(emit, e);
}

double CompiledExpr::operator()(const std::array<double, kVarCount>& vars) const {
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> inline_stack{};
    std::vector<double> heap_stack;
    double* stack = inline_stack.data();
    if (max_depth_ > kInline) {
        heap_stack.resize(max_depth_);
        stack = heap_stack.data();
    }
    std::size_t sp = 0;
    for (const Instr& ins : code_) {
        switch (ins.op) {
            case Op::Const: stack[sp++] = ins.value; break;
            case Op::Variable: stack[sp++] = vars[ins.var]; break;
            case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
            case Op::Sin:
            case Op::Cos:
            case Op::Exp:
            case Op::Log: stack[sp - 1] = apply_unary(ins.op, stack[sp - 1]); break;
            default: {
                const double b = stack[--sp];
                stack[sp - 1] = apply_binary(ins.op, stack[sp - 1], b);
            }
        }
    }
    return stack[0];
}

// ---------------------------------------------------------------------------
// differentiation

Expr diff_expr(const Expr& e, Var var) {
    if (!e.uses(var)) return Expr::constant(0.0);
    switch (e.op()) {
        case Op::Const: return Expr::constant(0.0);
        case Op::Variable: return Expr::constant(e.var() == var ? 1.0 : 0.0);
        case Op::Neg: return -diff_expr(e.arg(0), var);
        case Op::Sin: return Expr::unary(Op::Cos, e.arg(0)) * diff_expr(e.arg(0), var);
        case Op::Cos: return -(Expr::unary(Op::Sin, e.arg(0)) * diff_expr(e.arg(0), var));
        case Op::Exp: return e * diff_expr(e.arg(0), var);
        case Op::Log: return diff_expr(e.arg(0), var) / e.arg(0);
        case Op::Abs:
            fail(ErrorKind::Domain, std::string("non-differentiable: abs(...) depends on '") + var_name(var) +
                                        "' in " + e.to_string());
        case Op::Add: return diff_expr(e.arg(0), var) + diff_expr(e.arg(1), var);
        case Op::Sub: return diff_expr(e.arg(0), var) - diff_expr(e.arg(1), var);
        case Op::Mul: {
            const Expr& a = e.arg(0);
            const Expr& b = e.arg(1);
            return diff_expr(a, var) * b + a * diff_expr(b, var);
        }
        case Op::Div: {
            const Expr& a = e.arg(0);
            const Expr& b = e.arg(1);
            return (diff_expr(a, var) * b - a * diff_expr(b, var)) / Expr::binary(Op::Pow, b, Expr::constant(2.0));
        }
        case Op::Pow: {
            const Expr& base = e.arg(0);
            const Expr& expo = e.arg(1);
            if (!expo.uses(var)) {
                return expo * Expr::binary(Op::Pow, base, expo - Expr::constant(1.0)) * diff_expr(base, var);
            }
            if (base.is_constant() && base.value() > 0.0) {
                return e * Expr::constant(std::log(base.value())) * diff_expr(expo, var);
            }
            // a^b = exp(b log a); only defined for a > 0
            return e * (diff_expr(expo, var) * Expr::unary(Op::Log, base) + expo * diff_expr(base, var) / base);
        }
    }
    fail(ErrorKind::Domain, "diff: unknown node");
}

}  // namespace degenkit
