#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "tsg/bounds.hpp"
#include "tsg/gridfun.hpp"

namespace tsg {

/// Hard cap on tabulated kernel storage: a 6-index table holds
/// (n1*n2*n3)^2 entries, which grows fast enough to deserve a fence.
inline constexpr std::size_t kMaxTabulatedKernelEntries = 1u << 20;

/// Node cap for residual computations that cannot exploit a separable
/// kernel; their cost grows with the square of the node count.
inline constexpr std::size_t kMaxDenseResidualNodes = 1u << 15;

/// F(x,y,z,s,t,q,u) = r(x,y,z) * f(s,t,q) * u
struct SeparableLinearKernel {
    GridFunction3 r;
    GridFunction3 f;
};

/// F(x,y,z,s,t,q,u) = r(x,y,z) * f(s,t,q) * u + w(s,t,q)
struct SeparableAffineKernel {
    GridFunction3 r;
    GridFunction3 f;
    GridFunction3 w;
};

/// F(x,y,z,s,t,q,u) = K[(x,y,z),(s,t,q)] * u with K given as a dense
/// (n1*n2*n3)^2 table, outer node index major.
struct TabulatedLinearKernel {
    Domain3 domain;
    std::vector<double> table;
};

/// A kernel of a Volterra-type dynamic integral equation
///   u(x,y,z) = z0(x,y,z) + int_{x0}^x int_{y0}^y int_a^b F(..., u(s,t,q)),
/// restricted to the built-in families above.
class KernelSpec {
public:
    static KernelSpec separable_linear(GridFunction3 r, GridFunction3 f);
    static KernelSpec separable_affine(GridFunction3 r, GridFunction3 f, GridFunction3 w);
    static KernelSpec tabulated_linear(Domain3 domain, std::vector<double> table);

    [[nodiscard]] const Domain3& domain() const;

    /// Evaluate F at outer node (i,j,k), inner node (s,t,q), solution value u.
    [[nodiscard]] double eval(std::size_t i, std::size_t j, std::size_t k, std::size_t s,
                              std::size_t t, std::size_t q, double u) const;

    [[nodiscard]] bool is_separable() const noexcept {
        return !std::holds_alternative<TabulatedLinearKernel>(kernel_);
    }
    [[nodiscard]] const SeparableLinearKernel* as_linear() const noexcept {
        return std::get_if<SeparableLinearKernel>(&kernel_);
    }
    [[nodiscard]] const SeparableAffineKernel* as_affine() const noexcept {
        return std::get_if<SeparableAffineKernel>(&kernel_);
    }

private:
    using Variant =
        std::variant<SeparableLinearKernel, SeparableAffineKernel, TabulatedLinearKernel>;
    explicit KernelSpec(Variant kernel) : kernel_(std::move(kernel)) {}

    Variant kernel_;
};

/// Exact solution of the three-variable Volterra-type equation by forward
/// substitution over (i, j) layers in lexicographic order: the integral at
/// (x, y) only references strictly earlier s < x, t < y, so every layer is
/// explicit and the solution is unique. u equals z0 on the faces x = x0 and
/// y = y0. Throws KernelShapeMismatch, Overflow.
GridFunction3 solve_volterra_3d(const GridFunction3& z0, const KernelSpec& kernel);

/// The same solution computed by dense Picard iteration: sweep the full
/// grid, reevaluating the defining equation against the previous iterate,
/// until two consecutive sweeps agree bit for bit. Kept deliberately
/// independent of the forward-substitution path; the two must agree to
/// 1e-12 relative on every instance.
GridFunction3 solve_volterra_3d_picard(const GridFunction3& z0, const KernelSpec& kernel);

/// Exact solution of the two-variable equation u = a + int int f*u.
GridFunction2 solve_volterra_2d(const GridFunction2& a, const GridFunction2& f);

/// Residual of a trial function g against a kernel:
///   k(x,y,z) = int int int |F(x,y,z,s,t,q,g(s,t,q))|,
/// nonnegative by construction; zero on the x = x0 and y = y0 faces.
GridFunction3 residual_k(const GridFunction3& g, const KernelSpec& kernel);

/// Kernel-discrepancy residual of h between two equations:
///   kbar(x,y,z) = int int int |F(...,h(s,t,q)) - G(...,h(s,t,q))|.
/// Identically zero when both kernels agree.
GridFunction3 residual_kbar(const GridFunction3& h, const KernelSpec& kernel_f,
                            const KernelSpec& kernel_g);

enum class ToleranceKind {
    absolute,  // margin >= -tol
    relative,  // margin >= -tol * max(1, |subject|, |bound|) per node
};

/// Compare a subject grid against a bound grid node by node. The verdict is
/// dominated iff bound - subject >= -tol everywhere (tol scaled per node in
/// relative mode); max_violation records the worst max(subject - bound, 0).
BoundReport check_dominance(const GridFunction3& subject, const GridFunction3& bound, double tol,
                            ToleranceKind kind = ToleranceKind::absolute);
BoundReport check_dominance(const GridFunction2& subject, const GridFunction2& bound, double tol,
                            ToleranceKind kind = ToleranceKind::absolute);

} // namespace tsg
