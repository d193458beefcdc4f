#include "hflat/expr.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace hflat {

namespace {
std::atomic<std::uint64_t> g_next_id{1};
}

ExprNode::ExprNode(ExprKind k) : kind(k), id(g_next_id.fetch_add(1)) {}

static Expr make(ExprKind k) { return std::make_shared<ExprNode>(k); }

Expr constant(cplx c) {
    auto n = std::make_shared<ExprNode>(ExprKind::Constant);
    n->cval = c;
    return n;
}
Expr constant(double c) { return constant(cplx(c, 0.0)); }

Expr variable() { return make(ExprKind::Variable); }

bool is_constant(const Expr& e, cplx* out) {
    if (e->kind != ExprKind::Constant) return false;
    if (out) *out = e->cval;
    return true;
}

static bool is_const_value(const Expr& e, double re, double im = 0.0) {
    cplx c;
    return is_constant(e, &c) && c == cplx(re, im);
}

Expr add(Expr x, Expr y) {
    cplx cx, cy;
    if (is_constant(x, &cx) && is_constant(y, &cy)) return constant(cx + cy);
    if (is_const_value(x, 0.0)) return y;
    if (is_const_value(y, 0.0)) return x;
    auto n = std::make_shared<ExprNode>(ExprKind::Add);
    n->a = std::move(x);
    n->b = std::move(y);
    return n;
}

Expr sub(Expr x, Expr y) {
    cplx cx, cy;
    if (is_constant(x, &cx) && is_constant(y, &cy)) return constant(cx - cy);
    if (is_const_value(y, 0.0)) return x;
    if (is_const_value(x, 0.0)) return neg(y);
    auto n = std::make_shared<ExprNode>(ExprKind::Sub);
    n->a = std::move(x);
    n->b = std::move(y);
    return n;
}

Expr mul(Expr x, Expr y) {
    cplx cx, cy;
    if (is_constant(x, &cx) && is_constant(y, &cy)) return constant(cx * cy);
    if (is_const_value(x, 0.0) || is_const_value(y, 0.0)) return constant(0.0);
    if (is_const_value(x, 1.0)) return y;
    if (is_const_value(y, 1.0)) return x;
    auto n = std::make_shared<ExprNode>(ExprKind::Mul);
    n->a = std::move(x);
    n->b = std::move(y);
    return n;
}

Expr div(Expr x, Expr y) {
    cplx cx, cy;
    if (is_constant(x, &cx) && is_constant(y, &cy) && cy != cplx(0.0))
        return constant(cx / cy);
    if (is_const_value(x, 0.0)) return constant(0.0);
    if (is_const_value(y, 1.0)) return x;
    auto n = std::make_shared<ExprNode>(ExprKind::Div);
    n->a = std::move(x);
    n->b = std::move(y);
    return n;
}

Expr neg(Expr x) {
    cplx c;
    if (is_constant(x, &c)) return constant(-c);
    if (x->kind == ExprKind::Neg) return x->a;
    auto n = std::make_shared<ExprNode>(ExprKind::Neg);
    n->a = std::move(x);
    return n;
}

Expr powi(Expr x, int p) {
    cplx c;
    if (p == 0) return constant(1.0);
    if (p == 1) return x;
    if (is_constant(x, &c)) return constant(std::pow(c, p));
    auto n = std::make_shared<ExprNode>(ExprKind::PowInt);
    n->a = std::move(x);
    n->ipow = p;
    return n;
}

Expr powr(Expr x, double mu) {
    if (mu == std::floor(mu) && std::abs(mu) <= 64.0)
        return powi(std::move(x), static_cast<int>(mu));
    auto n = std::make_shared<ExprNode>(ExprKind::PowReal);
    n->a = std::move(x);
    n->rpow = mu;
    return n;
}

Expr sqrt_(Expr x) { return powr(std::move(x), 0.5); }

Expr exp_(Expr x) {
    cplx c;
    if (is_constant(x, &c)) return constant(std::exp(c));
    auto n = std::make_shared<ExprNode>(ExprKind::Exp);
    n->a = std::move(x);
    return n;
}

Expr log_(Expr x) {
    auto n = std::make_shared<ExprNode>(ExprKind::Log);
    n->a = std::move(x);
    return n;
}

Expr intexp(Expr integrand, cplx basepoint) {
    auto n = std::make_shared<ExprNode>(ExprKind::IntExp);
    n->a = std::move(integrand);
    n->basepoint = basepoint;
    return n;
}

Expr differentiate(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Constant: return constant(0.0);
        case ExprKind::Variable: return constant(1.0);
        case ExprKind::Add: return add(differentiate(e->a), differentiate(e->b));
        case ExprKind::Sub: return sub(differentiate(e->a), differentiate(e->b));
        case ExprKind::Mul:
            return add(mul(differentiate(e->a), e->b),
                       mul(e->a, differentiate(e->b)));
        case ExprKind::Div:
            return div(sub(mul(differentiate(e->a), e->b),
                           mul(e->a, differentiate(e->b))),
                       powi(e->b, 2));
        case ExprKind::Neg: return neg(differentiate(e->a));
        case ExprKind::PowInt:
            return mul(mul(constant(double(e->ipow)), differentiate(e->a)),
                       powi(e->a, e->ipow - 1));
        case ExprKind::PowReal:
            // mu * a' * a^mu / a, reusing this very node so the derivative
            // rides the same sheet as the original.
            return div(mul(mul(constant(e->rpow), differentiate(e->a)), e), e->a);
        case ExprKind::Exp: return mul(differentiate(e->a), e);
        case ExprKind::Log: return div(differentiate(e->a), e->a);
        case ExprKind::IntExp: return mul(e->a, e);
    }
    fail(ErrorCode::SpecError, "differentiate: bad node");
}

Expr compose(const Expr& e, const Expr& g) {
    switch (e->kind) {
        case ExprKind::Constant: return e;
        case ExprKind::Variable: return g;
        case ExprKind::Add: return add(compose(e->a, g), compose(e->b, g));
        case ExprKind::Sub: return sub(compose(e->a, g), compose(e->b, g));
        case ExprKind::Mul: return mul(compose(e->a, g), compose(e->b, g));
        case ExprKind::Div: return div(compose(e->a, g), compose(e->b, g));
        case ExprKind::Neg: return neg(compose(e->a, g));
        case ExprKind::PowInt: return powi(compose(e->a, g), e->ipow);
        case ExprKind::PowReal: return powr(compose(e->a, g), e->rpow);
        case ExprKind::Exp: return exp_(compose(e->a, g));
        case ExprKind::Log: return log_(compose(e->a, g));
        case ExprKind::IntExp:
            // exp(int_{z0}^{g(z)} h) is not a pullback of the 1-form; the
            // chart-changed object is exp(int (h.g) g') with matching base.
            fail(ErrorCode::SpecError,
                 "compose: path-integral nodes must be rebuilt in the new chart");
    }
    fail(ErrorCode::SpecError, "compose: bad node");
}

Expr substitute_subtree(const Expr& e, const Expr& target,
                        const Expr& replacement) {
    if (e.get() == target.get()) return replacement;
    switch (e->kind) {
        case ExprKind::Constant:
        case ExprKind::Variable: return e;
        case ExprKind::Add:
            return add(substitute_subtree(e->a, target, replacement),
                       substitute_subtree(e->b, target, replacement));
        case ExprKind::Sub:
            return sub(substitute_subtree(e->a, target, replacement),
                       substitute_subtree(e->b, target, replacement));
        case ExprKind::Mul:
            return mul(substitute_subtree(e->a, target, replacement),
                       substitute_subtree(e->b, target, replacement));
        case ExprKind::Div:
            return div(substitute_subtree(e->a, target, replacement),
                       substitute_subtree(e->b, target, replacement));
        case ExprKind::Neg:
            return neg(substitute_subtree(e->a, target, replacement));
        case ExprKind::PowInt:
            return powi(substitute_subtree(e->a, target, replacement), e->ipow);
        case ExprKind::PowReal: {
            Expr inner = substitute_subtree(e->a, target, replacement);
            if (inner.get() == e->a.get()) return e;
            return powr(inner, e->rpow);
        }
        case ExprKind::Exp:
            return exp_(substitute_subtree(e->a, target, replacement));
        case ExprKind::Log: {
            Expr inner = substitute_subtree(e->a, target, replacement);
            if (inner.get() == e->a.get()) return e;
            return log_(inner);
        }
        case ExprKind::IntExp: {
            Expr inner = substitute_subtree(e->a, target, replacement);
            if (inner.get() == e->a.get()) return e;
            return intexp(inner, e->basepoint);
        }
    }
    fail(ErrorCode::SpecError, "substitute_subtree: bad node");
}

static void collect_rec(const ExprNode* n,
                        std::vector<const ExprNode*>& out,
                        std::vector<const ExprNode*>& seen) {
    for (auto* s : seen)
        if (s == n) return;
    seen.push_back(n);
    if (n->a) collect_rec(n->a.get(), out, seen);
    if (n->b) collect_rec(n->b.get(), out, seen);
    if (n->multivalued_kind()) out.push_back(n);
}

void collect_multivalued(const Expr& e, std::vector<const ExprNode*>& out) {
    std::vector<const ExprNode*> seen;
    collect_rec(e.get(), out, seen);
}

bool branch_sensitive(const Expr& e) {
    std::vector<const ExprNode*> mv;
    collect_multivalued(e, mv);
    return !mv.empty();
}

namespace {

cplx eval_rec(const ExprNode* n, cplx z,
              std::unordered_map<const ExprNode*, cplx>& memo);

// Plain 15-point Gauss-Kronrod-free fallback: adaptive Simpson along the
// straight segment, principal-branch integrand.  Only used by bare
// evaluation of IntExp nodes.
cplx segment_integral_principal(const ExprNode* integrand, cplx a, cplx b,
                                int depth, cplx fa, cplx fm, cplx fb) {
    cplx m = 0.5 * (a + b);
    cplx lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    std::unordered_map<const ExprNode*, cplx> memo;
    memo.clear();
    cplx flm = eval_rec(integrand, lm, memo);
    memo.clear();
    cplx frm = eval_rec(integrand, rm, memo);
    cplx h = b - a;
    cplx whole = h * (fa + 4.0 * fm + fb) / 6.0;
    cplx left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    cplx right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    cplx refined = left + right;
    if (depth <= 0 || std::abs(refined - whole) < 1e-12) return refined;
    return segment_integral_principal(integrand, a, m, depth - 1, fa, flm, fm) +
           segment_integral_principal(integrand, m, b, depth - 1, fm, frm, fb);
}

cplx eval_rec(const ExprNode* n, cplx z,
              std::unordered_map<const ExprNode*, cplx>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    cplx v;
    switch (n->kind) {
        case ExprKind::Constant: v = n->cval; break;
        case ExprKind::Variable: v = z; break;
        case ExprKind::Add: v = eval_rec(n->a.get(), z, memo) + eval_rec(n->b.get(), z, memo); break;
        case ExprKind::Sub: v = eval_rec(n->a.get(), z, memo) - eval_rec(n->b.get(), z, memo); break;
        case ExprKind::Mul: v = eval_rec(n->a.get(), z, memo) * eval_rec(n->b.get(), z, memo); break;
        case ExprKind::Div: {
            cplx num = eval_rec(n->a.get(), z, memo);
            cplx den = eval_rec(n->b.get(), z, memo);
            v = num / den;
            break;
        }
        case ExprKind::Neg: v = -eval_rec(n->a.get(), z, memo); break;
        case ExprKind::PowInt: {
            cplx base = eval_rec(n->a.get(), z, memo);
            v = std::pow(base, n->ipow);
            break;
        }
        case ExprKind::PowReal: {
            cplx base = eval_rec(n->a.get(), z, memo);
            v = std::exp(cplx(n->rpow) * std::log(base));
            break;
        }
        case ExprKind::Exp: v = std::exp(eval_rec(n->a.get(), z, memo)); break;
        case ExprKind::Log: v = std::log(eval_rec(n->a.get(), z, memo)); break;
        case ExprKind::IntExp: {
            std::unordered_map<const ExprNode*, cplx> m2;
            cplx fa = eval_rec(n->a.get(), n->basepoint, m2);
            m2.clear();
            cplx fb = eval_rec(n->a.get(), z, m2);
            m2.clear();
            cplx fm = eval_rec(n->a.get(), 0.5 * (n->basepoint + z), m2);
            cplx I = (z == n->basepoint)
                         ? cplx(0.0)
                         : segment_integral_principal(n->a.get(), n->basepoint,
                                                      z, 24, fa, fm, fb);
            v = std::exp(I);
            break;
        }
        default: fail(ErrorCode::SpecError, "eval: bad node");
    }
    memo.emplace(n, v);
    return v;
}

}  // namespace

cplx eval_principal(const Expr& e, cplx z) {
    std::unordered_map<const ExprNode*, cplx> memo;
    cplx v = eval_rec(e.get(), z, memo);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        fail(ErrorCode::PoleHit, "eval: non-finite value at z=" +
                                     std::to_string(z.real()) + "+" +
                                     std::to_string(z.imag()) + "i");
    return v;
}

Expr schwarzian(const Expr& G) {
    Expr g1 = differentiate(G);
    cplx c;
    if (is_constant(g1, &c) && c == cplx(0.0))
        fail(ErrorCode::ConstantInput, "schwarzian: constant input");
    Expr pre = div(differentiate(g1), g1);  // G''/G'
    return sub(differentiate(pre), mul(constant(0.5), powi(pre, 2)));
}

Expr schwarzian_of_form(const Expr& omega_hat) {
    cplx c;
    if (is_constant(omega_hat, &c) && c == cplx(0.0))
        fail(ErrorCode::ZeroForm, "schwarzian_of_form: zero form");
    Expr pre = div(differentiate(omega_hat), omega_hat);  // w'/w
    return sub(differentiate(pre), mul(constant(0.5), powi(pre, 2)));
}

// ----------------------------------------------------------------------
// parser

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    const std::map<std::string, cplx>& consts;
    const std::map<std::string, Expr>& bindings;

    Parser(const std::string& text, const std::map<std::string, cplx>& c,
           const std::map<std::string, Expr>& b)
        : s(text), consts(c), bindings(b) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    [[noreturn]] void err(const std::string& msg) {
        fail(ErrorCode::ParseError,
             "parse error at position " + std::to_string(pos) + ": " + msg +
                 " in \"" + s + "\"");
    }

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos != s.size()) err("trailing input");
        return e;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat('+')) e = add(e, term());
            else if (eat('-')) e = sub(e, term());
            else return e;
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (eat('*')) e = mul(e, factor());
            else if (eat('/')) e = div(e, factor());
            else return e;
        }
    }

    Expr factor() {
        Expr base = unary();
        if (eat('^')) {
            // exponent: signed number or parenthesized constant expression
            Expr ex = unary();
            cplx c;
            if (!is_constant(ex, &c)) err("exponent must be constant");
            if (c.imag() != 0.0) err("exponent must be real");
            return powr(base, c.real());
        }
        return base;
    }

    Expr unary() {
        if (eat('-')) return neg(unary());
        return primary();
    }

    Expr primary() {
        skip_ws();
        if (pos >= s.size()) err("unexpected end");
        char c = s[pos];
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (c == '(') {
            ++pos;
            Expr e = expr();
            if (!eat(')')) err("expected )");
            return e;
        }
        if (std::isalpha((unsigned char)c) || c == '_') return ident_or_call();
        err("unexpected character");
    }

    Expr number() {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit((unsigned char)s[pos]) || s[pos] == '.'))
            ++pos;
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            size_t save = pos;
            ++pos;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            if (pos < s.size() && std::isdigit((unsigned char)s[pos])) {
                while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            } else {
                pos = save;
            }
        }
        return constant(std::stod(s.substr(start, pos - start)));
    }

    Expr ident_or_call() {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
            ++pos;
        std::string name = s.substr(start, pos - start);
        if (peek() == '(') {
            eat('(');
            if (name == "pow") {
                Expr arg = expr();
                if (!eat(',')) err("pow expects two arguments");
                Expr ex = expr();
                if (!eat(')')) err("expected )");
                cplx c;
                if (!is_constant(ex, &c) || c.imag() != 0.0)
                    err("pow exponent must be a real constant");
                return powr(arg, c.real());
            }
            Expr arg = expr();
            if (!eat(')')) err("expected )");
            if (name == "exp") return exp_(arg);
            if (name == "log") return log_(arg);
            if (name == "sqrt") return sqrt_(arg);
            err("unknown function '" + name + "'");
        }
        if (name == "z") return variable();
        if (name == "i") return constant(kI);
        if (name == "pi") return constant(kPi);
        auto bit = bindings.find(name);
        if (bit != bindings.end()) return bit->second;
        auto it = consts.find(name);
        if (it == consts.end()) err("unbound identifier '" + name + "'");
        return constant(it->second);
    }
};

void print_rec(const ExprNode* n, std::ostringstream& out, int parent_prec);

int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::PowInt:
        case ExprKind::PowReal: return 4;
        default: return 5;
    }
}

void print_num(double v, std::ostringstream& out) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << v;
    out << tmp.str();
}

void print_const(cplx c, std::ostringstream& out) {
    if (c.imag() == 0.0) {
        if (c.real() < 0.0) {
            out << "(";
            print_num(c.real(), out);
            out << ")";
        } else {
            print_num(c.real(), out);
        }
        return;
    }
    out << "(";
    print_num(c.real(), out);
    out << "+";
    print_num(c.imag(), out);
    out << "*i)";
}

void print_rec(const ExprNode* n, std::ostringstream& out, int parent_prec) {
    int prec = precedence(n->kind);
    bool need = prec < parent_prec;
    if (need) out << "(";
    switch (n->kind) {
        case ExprKind::Constant: print_const(n->cval, out); break;
        case ExprKind::Variable: out << "z"; break;
        case ExprKind::Add:
            print_rec(n->a.get(), out, prec);
            out << "+";
            print_rec(n->b.get(), out, prec + 1);
            break;
        case ExprKind::Sub:
            print_rec(n->a.get(), out, prec);
            out << "-";
            print_rec(n->b.get(), out, prec + 1);
            break;
        case ExprKind::Mul:
            print_rec(n->a.get(), out, prec);
            out << "*";
            print_rec(n->b.get(), out, prec + 1);
            break;
        case ExprKind::Div:
            print_rec(n->a.get(), out, prec);
            out << "/";
            print_rec(n->b.get(), out, prec + 1);
            break;
        case ExprKind::Neg:
            out << "-";
            print_rec(n->a.get(), out, prec + 1);
            break;
        case ExprKind::PowInt:
            print_rec(n->a.get(), out, prec + 1);
            out << "^" << n->ipow;
            break;
        case ExprKind::PowReal:
            out << "pow(";
            print_rec(n->a.get(), out, 0);
            out << ",";
            print_num(n->rpow, out);
            out << ")";
            break;
        case ExprKind::Exp:
            out << "exp(";
            print_rec(n->a.get(), out, 0);
            out << ")";
            break;
        case ExprKind::Log:
            out << "log(";
            print_rec(n->a.get(), out, 0);
            out << ")";
            break;
        case ExprKind::IntExp:
            out << "intexp(";
            print_rec(n->a.get(), out, 0);
            out << ";";
            print_const(n->basepoint, out);
            out << ")";
            break;
    }
    if (need) out << ")";
}

}  // namespace

Expr parse_expr(const std::string& text,
                const std::map<std::string, cplx>& constants,
                const std::map<std::string, Expr>& bindings) {
    Parser p(text, constants, bindings);
    return p.parse();
}

std::string to_string(const Expr& e) {
    std::ostringstream out;
    print_rec(e.get(), out, 0);
    return out.str();
}

}  // namespace hflat
