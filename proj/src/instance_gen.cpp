#include "tsg/instance_gen.hpp"

#include <algorithm>

namespace tsg {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over the combined value
    std::uint64_t v = master ^ (index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
}

TimeScale random_scale(Rng& rng, std::size_t max_points) {
    const std::size_t n = 2 + rng.index(max_points - 1);  // point count in [2, max]
    switch (rng.index(3)) {
        case 0: {
            // sorted "uniforms": an increasing walk with well-separated gaps
            std::vector<double> pts(n);
            double v = rng.uniform(-1.0, 1.0);
            const double gap_scale = 2.5 / static_cast<double>(n - 1);
            pts[0] = v;
            for (std::size_t i = 1; i < n; ++i) {
                v += (0.1 + rng.uniform()) * gap_scale;
                pts[i] = v;
            }
            return TimeScale::from_points(std::move(pts));
        }
        case 1: {
            const long lo = static_cast<long>(rng.index(7)) - 3;
            return TimeScale::integers(lo, lo + static_cast<long>(n) - 1);
        }
        default: {
            const double q = rng.uniform(1.05, 1.4);
            const double t0 = rng.uniform(0.5, 2.0);
            return TimeScale::q_scale(q, t0, n - 1);
        }
    }
}

Domain3 random_domain(Rng& rng, const FuzzCaps& caps) {
    return Domain3{random_scale(rng, caps.max_points_xy), random_scale(rng, caps.max_points_xy),
                   random_scale(rng, caps.max_points_i)};
}

GridFunction3 random_nonneg_grid(Rng& rng, const Domain3& domain, double coeff_max) {
    std::vector<double> vals(domain.node_count());
    for (double& v : vals) {
        v = rng.uniform(0.0, coeff_max);
    }
    return GridFunction3(domain, std::move(vals));
}

GridFunction3 random_signed_grid(Rng& rng, const Domain3& domain, double coeff_max) {
    std::vector<double> vals(domain.node_count());
    for (double& v : vals) {
        v = rng.uniform(-coeff_max, coeff_max);
    }
    return GridFunction3(domain, std::move(vals));
}

GridFunction2 random_nonneg_grid2(Rng& rng, const TimeScale& t1, const TimeScale& t2,
                                  double coeff_max) {
    std::vector<double> vals(t1.size() * t2.size());
    for (double& v : vals) {
        v = rng.uniform(0.0, coeff_max);
    }
    return GridFunction2(t1, t2, std::move(vals));
}

GridFunction2 random_nondecreasing_grid2(Rng& rng, const TimeScale& t1, const TimeScale& t2,
                                         double coeff_max) {
    const std::size_t n1 = t1.size(), n2 = t2.size();
    std::vector<double> vals(n1 * n2);
    const double base = rng.uniform(0.0, coeff_max);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double inc = rng.uniform(0.0, coeff_max / 4.0);
            const double above = i > 0 ? vals[(i - 1) * n2 + j] : base;
            const double left = j > 0 ? vals[i * n2 + j - 1] : base;
            vals[i * n2 + j] = std::max(above, left) + inc;
        }
    }
    return GridFunction2(t1, t2, std::move(vals));
}

} // namespace tsg
