#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsg {

/// Error categories raised by the engine. Each maps to one failure mode of
/// the public operations; the CLI turns any of them into exit code 2.
enum class Errc {
    non_monotonic,          // scale points not strictly increasing
    too_few_points,         // scale shorter than two points
    bad_parameter,          // malformed construction parameter (q <= 1, n < 1, ...)
    not_in_scale,           // timestamp not a member of the scale (1e-12 tolerance)
    reversed_range,         // lo > hi; backward integration is rejected
    not_regressive,         // some factor 1 + mu*p <= 0, exponential undefined
    overflow,               // non-finite value produced by an accumulation
    shape_mismatch,         // tabulated data does not match the grid
    syntax_error,           // expression text failed to parse
    unknown_identifier,     // identifier outside {x,y,z,s,t,q} and function names
    expression_error,       // expression evaluation failed (unbound var, div by zero)
    hypothesis_violated,    // bound hypothesis fails (e.g. non-monotone lemma data)
    negative_input,         // nonnegativity requirement violated
    kernel_shape_mismatch,  // kernel components do not fit the domain
    missing_function,       // scenario lacks a function the theorem needs
    bad_scale_spec,         // scenario scale spec invalid
    parse_error,            // scenario document malformed
};

std::string_view errc_name(Errc code);

/// Exception carrying an Errc plus a human-readable message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace tsg
