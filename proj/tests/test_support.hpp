#pragma once

// Shared helpers for the test binaries: random expression trees for the
// parser round-trip property, plus a tiny relative-comparison helper.

#include <cmath>
#include <memory>

#include "tsg/expression.hpp"
#include "tsg/instance_gen.hpp"

namespace tsg::testsupport {

inline bool close_rel(double a, double b, double rel_tol) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= rel_tol * scale;
}

inline ExprPtr make_node(Expr e) {
    return std::make_shared<Expr>(std::move(e));
}

/// Random expression tree over all six variables. Literals are nonnegative
/// (negative values come from Negate nodes, matching what the parser can
/// produce); exponents are kept as small literals so evaluation stays finite.
inline ExprPtr random_expr_tree(Rng& rng, int depth) {
    if (depth <= 0) {
        if (rng.coin()) {
            return make_node(Expr{VarRef{static_cast<Var>(rng.index(6))}});
        }
        // values with both short and long decimal expansions
        const double raw = rng.uniform(0.0, 8.0);
        const double value = rng.coin() ? std::floor(raw) : raw;
        return make_node(Expr{Literal{value}});
    }
    switch (rng.index(8)) {
        case 0:
            return make_node(Expr{Negate{random_expr_tree(rng, depth - 1)}});
        case 1:
            return make_node(Expr{Call{FuncId::exp,
                                       make_node(Expr{Negate{random_expr_tree(rng, depth - 1)}}),
                                       nullptr}});
        case 2: {
            const FuncId fn = rng.coin() ? FuncId::sin : (rng.coin() ? FuncId::cos : FuncId::abs);
            return make_node(Expr{Call{fn, random_expr_tree(rng, depth - 1), nullptr}});
        }
        case 3: {
            const FuncId fn = rng.coin() ? FuncId::min : FuncId::max;
            return make_node(Expr{Call{fn, random_expr_tree(rng, depth - 1),
                                       random_expr_tree(rng, depth - 1)}});
        }
        case 4:
            // small literal exponent keeps pow well-behaved
            return make_node(Expr{Binary{BinaryOp::pow, random_expr_tree(rng, depth - 1),
                                         make_node(Expr{Literal{
                                             static_cast<double>(1 + rng.index(3))}})}});
        default: {
            const BinaryOp op = rng.coin() ? BinaryOp::add
                                           : (rng.coin() ? BinaryOp::sub
                                                         : (rng.coin() ? BinaryOp::mul
                                                                       : BinaryOp::div));
            return make_node(Expr{Binary{op, random_expr_tree(rng, depth - 1),
                                         random_expr_tree(rng, depth - 1)}});
        }
    }
}

inline Expression random_expression(Rng& rng, int max_depth = 4) {
    return Expression::from_tree(random_expr_tree(rng, 1 + static_cast<int>(rng.index(
                                                           static_cast<std::size_t>(max_depth)))));
}

/// Bind all six variables to random values in [lo, hi).
inline EvalContext random_context(Rng& rng, double lo = -2.0, double hi = 2.0) {
    EvalContext ctx;
    for (unsigned v = 0; v < 6; ++v) {
        ctx.bind(static_cast<Var>(v), rng.uniform(lo, hi));
    }
    return ctx;
}

/// One round trip: print, reparse, compare structure, compare evaluation at
/// random points (a matching evaluation error on both sides also counts).
inline bool expression_round_trip_ok(const Expression& tree, Rng& rng) {
    const std::string text = tree.str();
    const Expression reparsed = Expression::parse(text);
    if (!(tree == reparsed)) {
        return false;
    }
    for (int trial = 0; trial < 4; ++trial) {
        const EvalContext ctx = random_context(rng);
        bool threw_direct = false, threw_reparsed = false;
        double direct = 0.0, round = 0.0;
        try {
            direct = tree.eval(ctx);
        } catch (const Error&) {
            threw_direct = true;
        }
        try {
            round = reparsed.eval(ctx);
        } catch (const Error&) {
            threw_reparsed = true;
        }
        if (threw_direct != threw_reparsed) {
            return false;
        }
        if (!threw_direct && !close_rel(direct, round, 1e-12)) {
            return false;
        }
    }
    return true;
}

} // namespace tsg::testsupport
