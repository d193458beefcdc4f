#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "hflat/types.hpp"

namespace hflat {

// Expression trees for meromorphic data in one chart variable.
//
// Nodes are immutable and shared; subtree sharing is semantic for the
// multivalued kinds (PowReal with non-integer exponent, Log, IntExp): two
// occurrences of the *same* node object track one common sheet during
// analytic continuation, while structurally equal but distinct nodes track
// independent sheets.
//
// IntExp(g; z0) denotes exp(int_{z0}^{z} g(w) dw).  It is the device that
// makes functions like exp(int dG/(G-G*)) and path-integrated conformal
// factors first-class expressions; its derivative is g * itself, so the
// class is closed under differentiation.

enum class ExprKind {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowInt,
    PowReal,
    Exp,
    Log,
    IntExp,
};

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode : public std::enable_shared_from_this<ExprNode> {
  public:
    ExprKind kind;
    cplx cval{0.0, 0.0};  // Constant
    int ipow = 0;         // PowInt
    double rpow = 0.0;    // PowReal
    cplx basepoint{0.0, 0.0};  // IntExp lower limit
    Expr a, b;
    std::uint64_t id;  // stable per-process identity, used by sheet states

    ExprNode(ExprKind k);
    bool multivalued_kind() const {
        return kind == ExprKind::PowReal || kind == ExprKind::Log ||
               kind == ExprKind::IntExp;
    }
};

// --- constructors (with light constant folding) ---
Expr constant(cplx c);
Expr constant(double c);
Expr variable();
Expr add(Expr x, Expr y);
Expr sub(Expr x, Expr y);
Expr mul(Expr x, Expr y);
Expr div(Expr x, Expr y);
Expr neg(Expr x);
Expr powi(Expr x, int n);
Expr powr(Expr x, double mu);  // principal sheet fixed at continuation start
Expr sqrt_(Expr x);
Expr exp_(Expr x);
Expr log_(Expr x);
Expr intexp(Expr integrand, cplx basepoint);

bool is_constant(const Expr& e, cplx* out = nullptr);

// Exact symbolic derivative; closed over the node kinds above.
Expr differentiate(const Expr& e);

// Structural substitution of the chart variable: e(z := g(z)).
Expr compose(const Expr& e, const Expr& g);

// Replace every occurrence of the node `target` (by identity) with
// `replacement`; used e.g. to flip a hyperelliptic sheet by w -> -w.
Expr substitute_subtree(const Expr& e, const Expr& target,
                        const Expr& replacement);

// True if the tree contains a sheet-carrying node (real power with
// non-integer exponent, log, or path-integral exponential).
bool branch_sensitive(const Expr& e);

// Collect multivalued nodes, children before parents, deduplicated.
void collect_multivalued(const Expr& e, std::vector<const ExprNode*>& out);

// Principal-branch evaluation at a point.  For IntExp nodes the integral is
// taken along the straight segment from the node basepoint (no singularity
// avoidance); callers that care about sheets must evaluate through a
// Contour/PathEvaluator instead.
cplx eval_principal(const Expr& e, cplx z);

// Per-call memo so shared subtrees are evaluated once.
class EvalMemo {
  public:
    std::unordered_map<const ExprNode*, cplx> values;
};

// Schwarzian derivative of G with respect to the chart variable:
// (G''/G')' - (G''/G')^2 / 2, returned as the coefficient of dz^2.
Expr schwarzian(const Expr& G);

// Schwarzian of the integral of a 1-form with coefficient w:
// (w'/w)' - (w'/w)^2 / 2, as the coefficient of dz^2.
Expr schwarzian_of_form(const Expr& omega_hat);

// --- text grammar ---
// expr    := term (('+'|'-') term)*
// term    := factor (('*'|'/') factor)*
// factor  := unary ('^' exponent)?
// unary   := '-' unary | primary
// primary := number | 'i' | 'z' | ident | func '(' args ')' | '(' expr ')'
// funcs   : exp, log, sqrt, pow(expr, real)
// Identifiers other than z/i must be bound in `constants`.
Expr parse_expr(const std::string& text,
                const std::map<std::string, cplx>& constants = {},
                const std::map<std::string, Expr>& bindings = {});

std::string to_string(const Expr& e);

}  // namespace hflat
