#include "tsg/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsg {

namespace {

void validate_points(const std::vector<double>& points) {
    if (points.size() < 2) {
        throw Error(Errc::too_few_points,
                    "a time scale needs at least 2 points, got " + std::to_string(points.size()));
    }
    for (double p : points) {
        if (!std::isfinite(p)) {
            throw Error(Errc::bad_parameter, "scale points must be finite");
        }
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] - points[i - 1] <= kPointTolerance) {
            throw Error(Errc::non_monotonic,
                        "points must be strictly increasing; offending pair at index " +
                            std::to_string(i - 1) + " (" + std::to_string(points[i - 1]) + ", " +
                            std::to_string(points[i]) + ")");
        }
    }
}

} // namespace

TimeScale TimeScale::from_points(std::vector<double> points) {
    validate_points(points);
    return TimeScale(std::move(points), Provenance::explicit_points);
}

TimeScale TimeScale::uniform(double start, double stop, std::size_t n) {
    if (!(std::isfinite(start) && std::isfinite(stop)) || stop <= start) {
        throw Error(Errc::bad_parameter, "uniform scale requires finite start < stop");
    }
    if (n < 1) {
        throw Error(Errc::bad_parameter, "uniform scale requires n >= 1 subintervals");
    }
    std::vector<double> pts(n + 1);
    const double width = stop - start;
    for (std::size_t i = 0; i <= n; ++i) {
        pts[i] = start + width * (static_cast<double>(i) / static_cast<double>(n));
    }
    pts.back() = stop;  // endpoint exact regardless of rounding in the ratio
    validate_points(pts);
    return TimeScale(std::move(pts), Provenance::uniform);
}

TimeScale TimeScale::integers(long lo, long hi) {
    if (hi <= lo) {
        throw Error(Errc::bad_parameter, "integer scale requires lo < hi");
    }
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(hi - lo) + 1);
    for (long v = lo; v <= hi; ++v) {
        pts.push_back(static_cast<double>(v));
    }
    return TimeScale(std::move(pts), Provenance::integers);
}

TimeScale TimeScale::q_scale(double q, double t0, std::size_t n) {
    if (!(q > 1.0) || !std::isfinite(q)) {
        throw Error(Errc::bad_parameter, "q_scale requires q > 1");
    }
    if (!(t0 > 0.0) || !std::isfinite(t0)) {
        throw Error(Errc::bad_parameter, "q_scale requires t0 > 0");
    }
    if (n < 1) {
        throw Error(Errc::bad_parameter, "q_scale requires n >= 1");
    }
    std::vector<double> pts(n + 1);
    double v = t0;
    for (std::size_t k = 0; k <= n; ++k) {
        pts[k] = v;
        v *= q;
    }
    validate_points(pts);
    return TimeScale(std::move(pts), Provenance::q_scale);
}

std::size_t TimeScale::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    // candidate at or after t, plus the one just before
    if (it != points_.end() && std::abs(*it - t) <= kPointTolerance) {
        return static_cast<std::size_t>(it - points_.begin());
    }
    if (it != points_.begin() && std::abs(*(it - 1) - t) <= kPointTolerance) {
        return static_cast<std::size_t>(it - points_.begin()) - 1;
    }
    throw Error(Errc::not_in_scale, std::to_string(t) + " is not a point of the scale");
}

bool TimeScale::contains(double t) const noexcept {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it != points_.end() && std::abs(*it - t) <= kPointTolerance) return true;
    if (it != points_.begin() && std::abs(*(it - 1) - t) <= kPointTolerance) return true;
    return false;
}

Jump TimeScale::jump(double t) const {
    const std::size_t i = index_of(t);
    const double here = points_[i];
    Jump j;
    j.sigma = i + 1 < points_.size() ? points_[i + 1] : here;
    j.rho = i > 0 ? points_[i - 1] : here;
    j.mu = j.sigma - here;
    return j;
}

TimeScale TimeScale::refine(std::size_t factor) const {
    if (factor < 1) {
        throw Error(Errc::bad_parameter, "refine factor must be >= 1");
    }
    if (factor == 1) {
        return *this;
    }
    std::vector<double> pts;
    pts.reserve((points_.size() - 1) * factor + 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double lo = points_[i];
        const double gap = points_[i + 1] - lo;
        for (std::size_t m = 0; m < factor; ++m) {
            pts.push_back(lo + gap * (static_cast<double>(m) / static_cast<double>(factor)));
        }
    }
    pts.push_back(points_.back());
    validate_points(pts);
    return TimeScale(std::move(pts), Provenance::explicit_points);
}

TimeScale make_scale(const ScaleSpec& spec) {
    return std::visit(
        [](const auto& s) -> TimeScale {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ExplicitSpec>) {
                return TimeScale::from_points(s.points);
            } else if constexpr (std::is_same_v<S, UniformSpec>) {
                return TimeScale::uniform(s.start, s.stop, s.n);
            } else if constexpr (std::is_same_v<S, IntegersSpec>) {
                return TimeScale::integers(s.lo, s.hi);
            } else {
                return TimeScale::q_scale(s.q, s.t0, s.n);
            }
        },
        spec);
}

} // namespace tsg
