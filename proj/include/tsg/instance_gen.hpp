#pragma once

#include <cstdint>
#include <random>

#include "tsg/gridfun.hpp"
#include "tsg/timescale.hpp"

namespace tsg {

/// Deterministic random source for instance generation. mt19937_64 output is
/// fully specified by the standard; the double conversion is hand-rolled so
/// streams are reproducible across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    bool coin() { return (engine_() & 1u) != 0; }

private:
    std::mt19937_64 engine_;
};

/// Stable per-instance seed derivation (splitmix64 of master ^ index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Size and magnitude caps for random instances.
struct FuzzCaps {
    std::size_t max_points_xy = 12;  // |t1|, |t2|
    std::size_t max_points_i = 6;    // |i|
    double coeff_max = 2.0;          // coefficient magnitude
};

/// A random finite scale drawn from {sorted uniforms, integer segment,
/// geometric q-scale} with parameters kept small enough that the bound
/// formulas stay comfortably inside the finite double range.
TimeScale random_scale(Rng& rng, std::size_t max_points);

Domain3 random_domain(Rng& rng, const FuzzCaps& caps);

GridFunction3 random_nonneg_grid(Rng& rng, const Domain3& domain, double coeff_max);
GridFunction3 random_signed_grid(Rng& rng, const Domain3& domain, double coeff_max);
GridFunction2 random_nonneg_grid2(Rng& rng, const TimeScale& t1, const TimeScale& t2,
                                  double coeff_max);

/// Nonnegative grid nondecreasing in each variable, built as the running
/// double prefix sum of nonnegative increments over a random base.
GridFunction2 random_nondecreasing_grid2(Rng& rng, const TimeScale& t1, const TimeScale& t2,
                                         double coeff_max);

} // namespace tsg
