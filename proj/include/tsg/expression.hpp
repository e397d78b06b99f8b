#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "tsg/error.hpp"

namespace tsg {

/// The fixed variable set of the expression mini-language. The first three
/// name grid coordinates, the last three integration coordinates.
enum class Var : std::uint8_t { x = 0, y, z, s, t, q };

std::string_view var_name(Var v);

enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };
enum class FuncId : std::uint8_t { exp, sin, cos, abs, min, max };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
    double value;  // always nonnegative in parsed trees; negation is a node
};
struct VarRef {
    Var var;
};
struct Negate {
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    FuncId fn;
    ExprPtr arg0;
    ExprPtr arg1;  // null for one-argument functions
};

struct Expr {
    std::variant<Literal, VarRef, Negate, Binary, Call> node;
};

/// Variable bindings for evaluation. Reading an unbound variable throws
/// ExpressionError naming the variable.
class EvalContext {
public:
    EvalContext& bind(Var v, double value) {
        values_[static_cast<std::size_t>(v)] = value;
        bound_ |= mask_of(v);
        return *this;
    }

    [[nodiscard]] double get(Var v) const;
    [[nodiscard]] std::uint8_t bound_mask() const noexcept { return bound_; }

    static constexpr std::uint8_t mask_of(Var v) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
    }

private:
    std::array<double, 6> values_{};
    std::uint8_t bound_ = 0;
};

/// A parsed arithmetic expression over {x, y, z, s, t, q}, the binary
/// operators + - * / ^ (with ^ right-associative and binding tighter than
/// unary minus), and the functions exp, sin, cos, abs, min, max.
class Expression {
public:
    /// Recursive-descent parse. Throws SyntaxError with a byte offset, or
    /// UnknownIdentifier for identifiers outside the fixed vocabulary.
    static Expression parse(std::string_view src);

    /// Evaluate against bound variables. Division by zero, zero to a
    /// negative power, domain errors, and non-finite results all throw
    /// ExpressionError; evaluation never crashes or returns NaN/inf.
    [[nodiscard]] double eval(const EvalContext& ctx) const;

    /// Pretty-print. The output reparses to a structurally equal tree;
    /// literals are emitted with 17 significant digits so values survive
    /// the round trip bit-exactly.
    [[nodiscard]] std::string str() const;

    /// Bitmask (via EvalContext::mask_of) of variables the tree references.
    [[nodiscard]] std::uint8_t free_var_mask() const noexcept { return free_vars_; }

    /// Structural tree equality; literal payloads compare bit-exactly.
    bool operator==(const Expression& other) const noexcept;

    /// Build directly from a tree (used by generators in tests).
    static Expression from_tree(ExprPtr root);

    [[nodiscard]] const ExprPtr& root() const noexcept { return root_; }

private:
    explicit Expression(ExprPtr root);

    ExprPtr root_;
    std::uint8_t free_vars_ = 0;
};

} // namespace tsg
