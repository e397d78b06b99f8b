#include "tsg/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <vector>

namespace tsg {

std::string_view var_name(Var v) {
    switch (v) {
        case Var::x: return "x";
        case Var::y: return "y";
        case Var::z: return "z";
        case Var::s: return "s";
        case Var::t: return "t";
        case Var::q: return "q";
    }
    return "?";
}

double EvalContext::get(Var v) const {
    if ((bound_ & mask_of(v)) == 0) {
        throw Error(Errc::expression_error,
                    "variable '" + std::string(var_name(v)) + "' is not bound in this context");
    }
    return values_[static_cast<std::size_t>(v)];
}

namespace {

// ============================================================================
// Tokenizer
// ============================================================================

enum class TokKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    TokKind kind;
    std::size_t offset;
    double number = 0.0;
    std::string ident;
};

[[noreturn]] void syntax_error(const std::string& what, std::size_t offset) {
    throw Error(Errc::syntax_error, what + " at offset " + std::to_string(offset));
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            // strtod consumes the longest valid prefix, including exponents
            const std::string text(src.substr(start));
            char* endp = nullptr;
            const double value = std::strtod(text.c_str(), &endp);
            if (endp == text.c_str()) {
                syntax_error("malformed number", start);
            }
            if (!std::isfinite(value)) {
                syntax_error("numeric literal out of range", start);
            }
            out.push_back({TokKind::number, start, value, {}});
            i = start + static_cast<std::size_t>(endp - text.c_str());
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({TokKind::ident, start, 0.0, std::string(src.substr(i, j - i))});
            i = j;
            continue;
        }
        TokKind kind;
        switch (c) {
            case '+': kind = TokKind::plus; break;
            case '-': kind = TokKind::minus; break;
            case '*': kind = TokKind::star; break;
            case '/': kind = TokKind::slash; break;
            case '^': kind = TokKind::caret; break;
            case '(': kind = TokKind::lparen; break;
            case ')': kind = TokKind::rparen; break;
            case ',': kind = TokKind::comma; break;
            default: syntax_error(std::string("unexpected character '") + c + "'", start);
        }
        out.push_back({kind, start, 0.0, {}});
        ++i;
    }
    out.push_back({TokKind::end, src.size(), 0.0, {}});
    return out;
}

std::optional<Var> lookup_var(const std::string& name) {
    if (name == "x") return Var::x;
    if (name == "y") return Var::y;
    if (name == "z") return Var::z;
    if (name == "s") return Var::s;
    if (name == "t") return Var::t;
    if (name == "q") return Var::q;
    return std::nullopt;
}

struct FuncInfo {
    FuncId id;
    int arity;
};

std::optional<FuncInfo> lookup_func(const std::string& name) {
    if (name == "exp") return FuncInfo{FuncId::exp, 1};
    if (name == "sin") return FuncInfo{FuncId::sin, 1};
    if (name == "cos") return FuncInfo{FuncId::cos, 1};
    if (name == "abs") return FuncInfo{FuncId::abs, 1};
    if (name == "min") return FuncInfo{FuncId::min, 2};
    if (name == "max") return FuncInfo{FuncId::max, 2};
    return std::nullopt;
}

// ============================================================================
// Recursive-descent parser
//
//   expression := term (('+' | '-') term)*
//   term       := factor (('*' | '/') factor)*
//   factor     := '-' factor | power
//   power      := primary ('^' factor)?          right-associative
//   primary    := number | var | func '(' args ')' | '(' expression ')'
// ============================================================================

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    ExprPtr run() {
        ExprPtr e = expression();
        if (peek().kind != TokKind::end) {
            syntax_error("trailing input", peek().offset);
        }
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }
    bool accept(TokKind k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(TokKind k, const char* what) {
        if (!accept(k)) {
            syntax_error(std::string("expected ") + what, peek().offset);
        }
    }

    // Subparses are sequenced into named locals before any aggregate is
    // built: GCC (pre-14) fails to destroy partially constructed aggregate
    // members when a trailing initializer throws, which leaks the lhs on a
    // syntax error.

    ExprPtr expression() {
        ExprPtr lhs = term();
        while (true) {
            if (accept(TokKind::plus)) {
                ExprPtr rhs = term();
                lhs = std::make_shared<Expr>(Expr{Binary{BinaryOp::add, lhs, rhs}});
            } else if (accept(TokKind::minus)) {
                ExprPtr rhs = term();
                lhs = std::make_shared<Expr>(Expr{Binary{BinaryOp::sub, lhs, rhs}});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (true) {
            if (accept(TokKind::star)) {
                ExprPtr rhs = factor();
                lhs = std::make_shared<Expr>(Expr{Binary{BinaryOp::mul, lhs, rhs}});
            } else if (accept(TokKind::slash)) {
                ExprPtr rhs = factor();
                lhs = std::make_shared<Expr>(Expr{Binary{BinaryOp::div, lhs, rhs}});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr factor() {
        if (accept(TokKind::minus)) {
            ExprPtr operand = factor();
            return std::make_shared<Expr>(Expr{Negate{operand}});
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (accept(TokKind::caret)) {
            // exponent parses as a factor so that 2^-3 and 2^3^2 both work
            ExprPtr exponent = factor();
            return std::make_shared<Expr>(Expr{Binary{BinaryOp::pow, base, exponent}});
        }
        return base;
    }

    ExprPtr primary() {
        const Token& tok = advance();
        switch (tok.kind) {
            case TokKind::number:
                return std::make_shared<Expr>(Expr{Literal{tok.number}});
            case TokKind::lparen: {
                ExprPtr e = expression();
                expect(TokKind::rparen, "')'");
                return e;
            }
            case TokKind::ident: {
                if (auto v = lookup_var(tok.ident)) {
                    return std::make_shared<Expr>(Expr{VarRef{*v}});
                }
                if (auto fn = lookup_func(tok.ident)) {
                    expect(TokKind::lparen, "'(' after function name");
                    ExprPtr a0 = expression();
                    ExprPtr a1;
                    if (fn->arity == 2) {
                        expect(TokKind::comma, "','");
                        a1 = expression();
                    }
                    expect(TokKind::rparen, "')'");
                    return std::make_shared<Expr>(Expr{Call{fn->id, a0, a1}});
                }
                throw Error(Errc::unknown_identifier, "'" + tok.ident + "' at offset " +
                                                          std::to_string(tok.offset));
            }
            default:
                syntax_error("expected a value", tok.offset);
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ============================================================================
// Evaluation
// ============================================================================

[[noreturn]] void eval_error(const std::string& what) {
    throw Error(Errc::expression_error, what);
}

double check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        eval_error(std::string(what) + " produced a non-finite value");
    }
    return v;
}

double eval_node(const Expr& e, const EvalContext& ctx);

double eval_binary(const Binary& b, const EvalContext& ctx) {
    const double lhs = eval_node(*b.lhs, ctx);
    const double rhs = eval_node(*b.rhs, ctx);
    switch (b.op) {
        case BinaryOp::add: return check_finite(lhs + rhs, "addition");
        case BinaryOp::sub: return check_finite(lhs - rhs, "subtraction");
        case BinaryOp::mul: return check_finite(lhs * rhs, "multiplication");
        case BinaryOp::div:
            if (rhs == 0.0) {
                eval_error("division by zero");
            }
            return check_finite(lhs / rhs, "division");
        case BinaryOp::pow:
            if (lhs == 0.0 && rhs < 0.0) {
                eval_error("zero raised to a negative power");
            }
            return check_finite(std::pow(lhs, rhs), "power");
    }
    eval_error("unreachable binary op");
}

double eval_call(const Call& c, const EvalContext& ctx) {
    const double a = eval_node(*c.arg0, ctx);
    switch (c.fn) {
        case FuncId::exp: return check_finite(std::exp(a), "exp");
        case FuncId::sin: return std::sin(a);
        case FuncId::cos: return std::cos(a);
        case FuncId::abs: return std::abs(a);
        case FuncId::min: return std::min(a, eval_node(*c.arg1, ctx));
        case FuncId::max: return std::max(a, eval_node(*c.arg1, ctx));
    }
    eval_error("unreachable function id");
}

double eval_node(const Expr& e, const EvalContext& ctx) {
    if (const auto* lit = std::get_if<Literal>(&e.node)) {
        return lit->value;
    }
    if (const auto* var = std::get_if<VarRef>(&e.node)) {
        return ctx.get(var->var);
    }
    if (const auto* neg = std::get_if<Negate>(&e.node)) {
        return -eval_node(*neg->operand, ctx);
    }
    if (const auto* bin = std::get_if<Binary>(&e.node)) {
        return eval_binary(*bin, ctx);
    }
    return eval_call(std::get<Call>(e.node), ctx);
}

// ============================================================================
// Pretty printer
//
// Precedence levels: add/sub 1, mul/div 2, negate 3, pow 4, atom 5.
// Right operands of the left-associative operators are parenthesized at
// equal precedence so the printed text reparses to the identical tree
// (a + (b + c) must not collapse into (a + b) + c).
// ============================================================================

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

int node_prec(const Expr& e) {
    if (std::holds_alternative<Literal>(e.node) || std::holds_alternative<VarRef>(e.node) ||
        std::holds_alternative<Call>(e.node)) {
        return kPrecAtom;
    }
    if (std::holds_alternative<Negate>(e.node)) {
        return kPrecNeg;
    }
    switch (std::get<Binary>(e.node).op) {
        case BinaryOp::add:
        case BinaryOp::sub: return kPrecAdd;
        case BinaryOp::mul:
        case BinaryOp::div: return kPrecMul;
        case BinaryOp::pow: return kPrecPow;
    }
    return kPrecAtom;
}

std::string format_literal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const Expr& e, std::string& out, int min_prec);

void print_wrapped(const Expr& e, std::string& out, int min_prec) {
    const bool parens = node_prec(e) < min_prec;
    if (parens) out += '(';
    print_node(e, out, 0);
    if (parens) out += ')';
}

void print_node(const Expr& e, std::string& out, int /*min_prec*/) {
    if (const auto* lit = std::get_if<Literal>(&e.node)) {
        out += format_literal(lit->value);
        return;
    }
    if (const auto* var = std::get_if<VarRef>(&e.node)) {
        out += var_name(var->var);
        return;
    }
    if (const auto* neg = std::get_if<Negate>(&e.node)) {
        out += '-';
        print_wrapped(*neg->operand, out, kPrecNeg);
        return;
    }
    if (const auto* bin = std::get_if<Binary>(&e.node)) {
        const char* op_text = nullptr;
        int prec = 0;
        switch (bin->op) {
            case BinaryOp::add: op_text = " + "; prec = kPrecAdd; break;
            case BinaryOp::sub: op_text = " - "; prec = kPrecAdd; break;
            case BinaryOp::mul: op_text = "*"; prec = kPrecMul; break;
            case BinaryOp::div: op_text = "/"; prec = kPrecMul; break;
            case BinaryOp::pow: op_text = "^"; prec = kPrecPow; break;
        }
        if (bin->op == BinaryOp::pow) {
            // right-associative: parenthesize an exponentiation on the left
            print_wrapped(*bin->lhs, out, prec + 1);
            out += op_text;
            print_wrapped(*bin->rhs, out, kPrecNeg);
        } else {
            print_wrapped(*bin->lhs, out, prec);
            out += op_text;
            print_wrapped(*bin->rhs, out, prec + 1);
        }
        return;
    }
    const auto& call = std::get<Call>(e.node);
    switch (call.fn) {
        case FuncId::exp: out += "exp"; break;
        case FuncId::sin: out += "sin"; break;
        case FuncId::cos: out += "cos"; break;
        case FuncId::abs: out += "abs"; break;
        case FuncId::min: out += "min"; break;
        case FuncId::max: out += "max"; break;
    }
    out += '(';
    print_node(*call.arg0, out, 0);
    if (call.arg1) {
        out += ", ";
        print_node(*call.arg1, out, 0);
    }
    out += ')';
}

std::uint8_t collect_vars(const Expr& e) {
    if (std::holds_alternative<Literal>(e.node)) {
        return 0;
    }
    if (const auto* var = std::get_if<VarRef>(&e.node)) {
        return EvalContext::mask_of(var->var);
    }
    if (const auto* neg = std::get_if<Negate>(&e.node)) {
        return collect_vars(*neg->operand);
    }
    if (const auto* bin = std::get_if<Binary>(&e.node)) {
        return collect_vars(*bin->lhs) | collect_vars(*bin->rhs);
    }
    const auto& call = std::get<Call>(e.node);
    std::uint8_t mask = collect_vars(*call.arg0);
    if (call.arg1) {
        mask |= collect_vars(*call.arg1);
    }
    return mask;
}

bool trees_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    if (const auto* la = std::get_if<Literal>(&a.node)) {
        return la->value == std::get<Literal>(b.node).value;
    }
    if (const auto* va = std::get_if<VarRef>(&a.node)) {
        return va->var == std::get<VarRef>(b.node).var;
    }
    if (const auto* na = std::get_if<Negate>(&a.node)) {
        return trees_equal(*na->operand, *std::get<Negate>(b.node).operand);
    }
    if (const auto* ba = std::get_if<Binary>(&a.node)) {
        const auto& bb = std::get<Binary>(b.node);
        return ba->op == bb.op && trees_equal(*ba->lhs, *bb.lhs) && trees_equal(*ba->rhs, *bb.rhs);
    }
    const auto& ca = std::get<Call>(a.node);
    const auto& cb = std::get<Call>(b.node);
    if (ca.fn != cb.fn || !trees_equal(*ca.arg0, *cb.arg0)) {
        return false;
    }
    if (static_cast<bool>(ca.arg1) != static_cast<bool>(cb.arg1)) {
        return false;
    }
    return !ca.arg1 || trees_equal(*ca.arg1, *cb.arg1);
}

} // namespace

Expression::Expression(ExprPtr root) : root_(std::move(root)), free_vars_(collect_vars(*root_)) {}

Expression Expression::parse(std::string_view src) {
    return Expression(Parser(src).run());
}

Expression Expression::from_tree(ExprPtr root) {
    if (!root) {
        throw Error(Errc::expression_error, "empty expression tree");
    }
    return Expression(std::move(root));
}

double Expression::eval(const EvalContext& ctx) const {
    return eval_node(*root_, ctx);
}

std::string Expression::str() const {
    std::string out;
    print_node(*root_, out, 0);
    return out;
}

bool Expression::operator==(const Expression& other) const noexcept {
    return trees_equal(*root_, *other.root_);
}

} // namespace tsg
