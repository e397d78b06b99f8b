#pragma once

#include <functional>
#include <vector>

#include "tsg/timescale.hpp"

namespace tsg {

/// A real-valued function tabulated on a time scale: one value per point.
class ScaleFunction {
public:
    /// Throws ShapeMismatch unless values has one entry per scale point;
    /// with require_nonnegative set, throws NegativeInput on any value < 0.
    ScaleFunction(TimeScale scale, std::vector<double> values, bool require_nonnegative = false);

    /// Tabulate a callable over the scale points.
    static ScaleFunction tabulate(const TimeScale& scale,
                                  const std::function<double(double)>& fn,
                                  bool require_nonnegative = false);

    /// Constant function on the scale.
    static ScaleFunction constant(const TimeScale& scale, double value);

    [[nodiscard]] const TimeScale& scale() const noexcept { return scale_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

private:
    TimeScale scale_;
    std::vector<double> values_;
};

/// Delta integral of f over the half-open range [lo, hi): the left-rule sum
/// of f(t) * mu(t), which is the exact value on a finite scale. Returns 0
/// when lo == hi. Throws NotInScale and ReversedRange (backward integration
/// is rejected, not sign-flipped).
double delta_integral(const ScaleFunction& f, double lo, double hi);

/// Time-scale exponential e_p(t, t0) evaluated by the product formula
/// prod_{s in [t0, t)} (1 + mu(s) * p(s)), which is exact because every
/// in-range point of a finite scale is isolated. Factors are accumulated in
/// ascending point order. Returns 1 when t == t0.
///
/// Throws NotRegressive if any factor 1 + mu*p is <= 0 (the positivity
/// convention: a zero or sign-flipping exponential is reported, not
/// returned), Overflow if the product leaves the finite double range,
/// NotInScale, ReversedRange.
double delta_exp(const ScaleFunction& p, double t, double t0);

/// True iff 1 + mu(s) * p(s) > 0 for every s in [lo, hi).
bool is_positively_regressive(const ScaleFunction& p, double lo, double hi);

} // namespace tsg
