#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "tsg/error.hpp"

namespace tsg {

/// Absolute tolerance for deciding whether a real timestamp is a member of a
/// scale. One resolution point for float fuzz; everything downstream resolves
/// timestamps to grid indices through this lookup.
inline constexpr double kPointTolerance = 1e-12;

/// Forward/backward jump operators and graininess at one scale point.
struct Jump {
    double sigma;  // next point, or t itself at the maximum
    double rho;    // previous point, or t itself at the minimum
    double mu;     // sigma - t, zero exactly at the maximum
};

/// How a scale's points were generated; kept for reporting and replay.
enum class Provenance { explicit_points, uniform, integers, q_scale };

/// A finite time scale: a strictly increasing set of at least two real
/// timestamps. All delta calculus on a finite scale is exact (every integral
/// is a finite sum, every in-range point is right-scattered), which is the
/// whole reason this engine restricts itself to them. The maximum point is
/// treated as right-dense: sigma(max) = max and mu(max) = 0.
///
/// Immutable after construction; safe for unrestricted concurrent reads.
class TimeScale {
public:
    /// Wrap an explicit strictly increasing point list.
    /// Throws TooFewPoints, NonMonotonic (duplicates within 1e-12 count as
    /// non-monotone), BadParameter on non-finite entries.
    static TimeScale from_points(std::vector<double> points);

    /// n+1 equally spaced points covering [start, stop], both ends included.
    static TimeScale uniform(double start, double stop, std::size_t n);

    /// The integer segment {lo, lo+1, ..., hi}.
    static TimeScale integers(long lo, long hi);

    /// The geometric scale {t0 * q^k : 0 <= k <= n}, q > 1, t0 > 0.
    static TimeScale q_scale(double q, double t0, std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return points_[i]; }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] double min() const noexcept { return points_.front(); }
    [[nodiscard]] double max() const noexcept { return points_.back(); }

    /// Index of the scale point equal to t within kPointTolerance.
    /// Throws NotInScale if no point matches.
    [[nodiscard]] std::size_t index_of(double t) const;

    /// True iff t matches a scale point within kPointTolerance.
    [[nodiscard]] bool contains(double t) const noexcept;

    /// Jump operators at t. Throws NotInScale.
    [[nodiscard]] Jump jump(double t) const;

    /// Graininess by index: points[i+1] - points[i], or 0 at the last index.
    [[nodiscard]] double mu_at(std::size_t i) const noexcept {
        return i + 1 < points_.size() ? points_[i + 1] - points_[i] : 0.0;
    }

    /// Subdivide every gap into `factor` equal subintervals. factor == 1
    /// returns the scale unchanged. Refined scales report explicit_points
    /// provenance (the generating formula no longer applies to them).
    /// Throws BadParameter for factor < 1.
    [[nodiscard]] TimeScale refine(std::size_t factor) const;

    [[nodiscard]] Provenance provenance() const noexcept { return provenance_; }

    bool operator==(const TimeScale& other) const noexcept {
        return points_ == other.points_;
    }

private:
    TimeScale(std::vector<double> points, Provenance provenance)
        : points_(std::move(points)), provenance_(provenance) {}

    std::vector<double> points_;
    Provenance provenance_ = Provenance::explicit_points;
};

// Scale construction specs as they appear in scenario files.

struct ExplicitSpec {
    std::vector<double> points;
};
struct UniformSpec {
    double start;
    double stop;
    std::size_t n;
};
struct IntegersSpec {
    long lo;
    long hi;
};
struct QScaleSpec {
    double q;
    double t0;
    std::size_t n;
};

using ScaleSpec = std::variant<ExplicitSpec, UniformSpec, IntegersSpec, QScaleSpec>;

/// Build a scale from a declarative spec, validating its parameters.
TimeScale make_scale(const ScaleSpec& spec);

} // namespace tsg
