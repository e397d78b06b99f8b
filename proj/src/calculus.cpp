#include "tsg/calculus.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace tsg {

namespace {

/// Resolve [lo, hi) to index bounds, rejecting reversed ranges.
std::pair<std::size_t, std::size_t> resolve_range(const TimeScale& scale, double lo, double hi) {
    const std::size_t ilo = scale.index_of(lo);
    const std::size_t ihi = scale.index_of(hi);
    if (ilo > ihi) {
        throw Error(Errc::reversed_range, "range [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + ") is reversed");
    }
    return {ilo, ihi};
}

} // namespace

ScaleFunction::ScaleFunction(TimeScale scale, std::vector<double> values, bool require_nonnegative)
    : scale_(std::move(scale)), values_(std::move(values)) {
    if (values_.size() != scale_.size()) {
        throw Error(Errc::shape_mismatch, "expected " + std::to_string(scale_.size()) +
                                              " values, got " + std::to_string(values_.size()));
    }
    if (require_nonnegative) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!(values_[i] >= 0.0)) {
                throw Error(Errc::negative_input, "value at index " + std::to_string(i) +
                                                      " is negative: " + std::to_string(values_[i]));
            }
        }
    }
}

ScaleFunction ScaleFunction::tabulate(const TimeScale& scale,
                                      const std::function<double(double)>& fn,
                                      bool require_nonnegative) {
    std::vector<double> vals(scale.size());
    for (std::size_t i = 0; i < scale.size(); ++i) {
        vals[i] = fn(scale[i]);
    }
    return ScaleFunction(scale, std::move(vals), require_nonnegative);
}

ScaleFunction ScaleFunction::constant(const TimeScale& scale, double value) {
    return ScaleFunction(scale, std::vector<double>(scale.size(), value));
}

double delta_integral(const ScaleFunction& f, double lo, double hi) {
    const auto [ilo, ihi] = resolve_range(f.scale(), lo, hi);
    double acc = 0.0;
    for (std::size_t i = ilo; i < ihi; ++i) {
        acc += f[i] * f.scale().mu_at(i);
    }
    return acc;
}

double delta_exp(const ScaleFunction& p, double t, double t0) {
    const auto [i0, i1] = resolve_range(p.scale(), t0, t);
    double prod = 1.0;
    for (std::size_t i = i0; i < i1; ++i) {
        const double factor = 1.0 + p.scale().mu_at(i) * p[i];
        if (!(factor > 0.0)) {
            throw Error(Errc::not_regressive,
                        "factor 1 + mu*p = " + std::to_string(factor) + " at point " +
                            std::to_string(p.scale()[i]));
        }
        prod *= factor;
        if (!std::isfinite(prod)) {
            throw Error(Errc::overflow, "exponential product left the finite range");
        }
    }
    return prod;
}

bool is_positively_regressive(const ScaleFunction& p, double lo, double hi) {
    const auto [i0, i1] = resolve_range(p.scale(), lo, hi);
    for (std::size_t i = i0; i < i1; ++i) {
        if (!(1.0 + p.scale().mu_at(i) * p[i] > 0.0)) {
            return false;
        }
    }
    return true;
}

} // namespace tsg
