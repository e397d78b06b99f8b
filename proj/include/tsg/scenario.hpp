#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsg/expression.hpp"
#include "tsg/timescale.hpp"

namespace tsg {

enum class TheoremId { lemma, thm21, thm31, thm32, thm33 };

std::string_view theorem_name(TheoremId id);
std::optional<TheoremId> theorem_from_name(std::string_view name);

/// True for the theorems living on a three-scale domain (everything but the
/// two-variable lemma).
bool theorem_is_3d(TheoremId id);

/// A named function: either an expression over the grid coordinates or an
/// explicit row-major table whose shape must match the scenario's scales.
struct FunctionDef {
    std::optional<Expression> expr;
    std::vector<double> table;        // flattened row-major values
    std::vector<std::size_t> shape;   // 2 or 3 extents; empty when expr is set

    [[nodiscard]] bool is_expression() const noexcept { return expr.has_value(); }
};

enum class KernelFamily { separable_linear, separable_affine, tabulated_linear };

/// Kernel description; separable families reference named functions.
struct KernelDef {
    KernelFamily family = KernelFamily::separable_linear;
    std::string r_name;
    std::string f_name;
    std::string w_name;           // separable_affine only
    std::vector<double> table;    // tabulated_linear only
};

struct FuzzParams {
    std::size_t count = 100;
    std::uint64_t seed = 0;
    std::size_t max_points_xy = 12;
    std::size_t max_points_i = 6;
    double coeff_max = 2.0;
};

/// One validated scenario document.
struct Scenario {
    ScaleSpec t1;
    ScaleSpec t2;
    std::optional<ScaleSpec> iscale;
    std::map<std::string, FunctionDef> functions;
    TheoremId theorem = TheoremId::lemma;
    std::optional<KernelDef> kernel;    // defaults to the theorem's equality case
    std::optional<KernelDef> kernel_g;  // comparison kernel, thm33 only
    double tolerance = 1e-9;
    FuzzParams fuzz;
};

struct Diagnostic {
    Errc code;
    std::string message;
};

/// Thrown by load_scenario; carries every validation problem found, not
/// just the first.
class ScenarioValidationError : public Error {
public:
    explicit ScenarioValidationError(std::vector<Diagnostic> diags);

    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    static std::string join_messages(const std::vector<Diagnostic>& diags);

    std::vector<Diagnostic> diags_;
};

/// Parse a scenario document (JSON) and validate it fully: scale specs,
/// function definitions, theorem requirements, kernel references, table
/// shapes and tolerances. Throws ScenarioValidationError listing all
/// problems when anything fails.
Scenario load_scenario(const std::string& text);

} // namespace tsg
