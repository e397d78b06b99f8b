#include "tsg/error.hpp"

namespace tsg {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::non_monotonic: return "NonMonotonic";
        case Errc::too_few_points: return "TooFewPoints";
        case Errc::bad_parameter: return "BadParameter";
        case Errc::not_in_scale: return "NotInScale";
        case Errc::reversed_range: return "ReversedRange";
        case Errc::not_regressive: return "NotRegressive";
        case Errc::overflow: return "Overflow";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::syntax_error: return "SyntaxError";
        case Errc::unknown_identifier: return "UnknownIdentifier";
        case Errc::expression_error: return "ExpressionError";
        case Errc::hypothesis_violated: return "HypothesisViolated";
        case Errc::negative_input: return "NegativeInput";
        case Errc::kernel_shape_mismatch: return "KernelShapeMismatch";
        case Errc::missing_function: return "MissingFunction";
        case Errc::bad_scale_spec: return "BadScaleSpec";
        case Errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

} // namespace tsg
