#include "tsg/oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace tsg {

namespace {

void require_domain(const Domain3& expected, const Domain3& got, const char* what) {
    if (!(expected == got)) {
        throw Error(Errc::kernel_shape_mismatch,
                    std::string(what) + " does not live on the equation's domain");
    }
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw Error(Errc::overflow, std::string(what) + " left the finite range");
    }
}

} // namespace

KernelSpec KernelSpec::separable_linear(GridFunction3 r, GridFunction3 f) {
    if (!r.same_shape(f)) {
        throw Error(Errc::kernel_shape_mismatch, "r and f tabulated on different domains");
    }
    return KernelSpec(Variant{SeparableLinearKernel{std::move(r), std::move(f)}});
}

KernelSpec KernelSpec::separable_affine(GridFunction3 r, GridFunction3 f, GridFunction3 w) {
    if (!r.same_shape(f) || !r.same_shape(w)) {
        throw Error(Errc::kernel_shape_mismatch, "r, f, w tabulated on different domains");
    }
    return KernelSpec(Variant{SeparableAffineKernel{std::move(r), std::move(f), std::move(w)}});
}

KernelSpec KernelSpec::tabulated_linear(Domain3 domain, std::vector<double> table) {
    const std::size_t n = domain.node_count();
    if (table.size() != n * n) {
        throw Error(Errc::kernel_shape_mismatch,
                    "tabulated kernel needs " + std::to_string(n * n) + " entries, got " +
                        std::to_string(table.size()));
    }
    if (table.size() > kMaxTabulatedKernelEntries) {
        throw Error(Errc::kernel_shape_mismatch,
                    "tabulated kernel exceeds the configured size limit");
    }
    return KernelSpec(Variant{TabulatedLinearKernel{std::move(domain), std::move(table)}});
}

const Domain3& KernelSpec::domain() const {
    if (const auto* lin = std::get_if<SeparableLinearKernel>(&kernel_)) {
        return lin->r.domain();
    }
    if (const auto* aff = std::get_if<SeparableAffineKernel>(&kernel_)) {
        return aff->r.domain();
    }
    return std::get<TabulatedLinearKernel>(kernel_).domain;
}

double KernelSpec::eval(std::size_t i, std::size_t j, std::size_t k, std::size_t s, std::size_t t,
                        std::size_t q, double u) const {
    if (const auto* lin = std::get_if<SeparableLinearKernel>(&kernel_)) {
        return lin->r.at(i, j, k) * lin->f.at(s, t, q) * u;
    }
    if (const auto* aff = std::get_if<SeparableAffineKernel>(&kernel_)) {
        return aff->r.at(i, j, k) * aff->f.at(s, t, q) * u + aff->w.at(s, t, q);
    }
    const auto& tab = std::get<TabulatedLinearKernel>(kernel_);
    const std::size_t n = tab.domain.node_count();
    const std::size_t outer = (i * tab.domain.n2() + j) * tab.domain.n3() + k;
    const std::size_t inner = (s * tab.domain.n2() + t) * tab.domain.n3() + q;
    return tab.table[outer * n + inner] * u;
}

GridFunction3 solve_volterra_3d(const GridFunction3& z0, const KernelSpec& kernel) {
    require_domain(z0.domain(), kernel.domain(), "kernel");
    const Domain3& d = z0.domain();
    const std::size_t n1 = d.n1(), n2 = d.n2(), n3 = d.n3();

    GridFunction3 u = z0;  // faces are already correct; interiors overwritten in order

    if (kernel.is_separable()) {
        // Row-by-row forward substitution in grid-linear time. For each
        // completed layer (s,t) the z-sum T(s,t) = sum_q f*u*mu3 is folded
        // into column accumulators R(t) = sum_{s<i} T(s,t)*mu1(s); the node
        // sum S(i,j) = sum_{t<j} R(t)*mu2(t) is then a running prefix along
        // the row. The same structure carries the affine term.
        const GridFunction3& f =
            kernel.as_linear() ? kernel.as_linear()->f : kernel.as_affine()->f;
        const GridFunction3& r =
            kernel.as_linear() ? kernel.as_linear()->r : kernel.as_affine()->r;
        const GridFunction3* w = kernel.as_affine() ? &kernel.as_affine()->w : nullptr;

        std::vector<double> col(n2, 0.0);    // R(t) for f*u
        std::vector<double> col_w(n2, 0.0);  // R(t) for w
        std::vector<double> row_t(n2, 0.0);  // T(i,t) of the row in progress
        for (std::size_t i = 0; i < n1; ++i) {
            double s_acc = 0.0;
            double w_acc = 0.0;
            for (std::size_t j = 0; j < n2; ++j) {
                if (j > 0) {
                    const double mu2 = d.t2.mu_at(j - 1);
                    s_acc += col[j - 1] * mu2;
                    w_acc += col_w[j - 1] * mu2;
                }
                for (std::size_t k = 0; k < n3; ++k) {
                    const double v = z0.at(i, j, k) + r.at(i, j, k) * s_acc + w_acc;
                    check_finite(v, "forward substitution");
                    u.at(i, j, k) = v;
                }
                double t_acc = 0.0;
                for (std::size_t q = 0; q + 1 < n3; ++q) {
                    t_acc += f.at(i, j, q) * u.at(i, j, q) * d.iscale.mu_at(q);
                }
                row_t[j] = t_acc;
            }
            const double mu1 = d.t1.mu_at(i);
            for (std::size_t j = 0; j < n2; ++j) {
                col[j] += row_t[j] * mu1;
                if (w != nullptr) {
                    double w_sum = 0.0;
                    for (std::size_t q = 0; q + 1 < n3; ++q) {
                        w_sum += w->at(i, j, q) * d.iscale.mu_at(q);
                    }
                    col_w[j] += w_sum * mu1;
                }
            }
        }
        return u;
    }

    // General kernel: direct six-index accumulation.
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t k = 0; k < n3; ++k) {
                double acc = 0.0;
                for (std::size_t s = 0; s < i; ++s) {
                    const double mu1 = d.t1.mu_at(s);
                    for (std::size_t t = 0; t < j; ++t) {
                        const double mu12 = mu1 * d.t2.mu_at(t);
                        for (std::size_t q = 0; q + 1 < n3; ++q) {
                            acc += kernel.eval(i, j, k, s, t, q, u.at(s, t, q)) * mu12 *
                                   d.iscale.mu_at(q);
                        }
                    }
                }
                const double v = z0.at(i, j, k) + acc;
                check_finite(v, "forward substitution");
                u.at(i, j, k) = v;
            }
        }
    }
    return u;
}

GridFunction3 solve_volterra_3d_picard(const GridFunction3& z0, const KernelSpec& kernel) {
    require_domain(z0.domain(), kernel.domain(), "kernel");
    const Domain3& d = z0.domain();
    const std::size_t n1 = d.n1(), n2 = d.n2(), n3 = d.n3();

    GridFunction3 prev = z0;
    const std::size_t max_sweeps = n1 * n2 + 1;  // fixpoint is reached in <= min(n1,n2)+1
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        GridFunction3 next = z0;
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                for (std::size_t k = 0; k < n3; ++k) {
                    double acc = 0.0;
                    for (std::size_t s = 0; s < i; ++s) {
                        const double mu1 = d.t1.mu_at(s);
                        for (std::size_t t = 0; t < j; ++t) {
                            const double mu12 = mu1 * d.t2.mu_at(t);
                            for (std::size_t q = 0; q + 1 < n3; ++q) {
                                acc += kernel.eval(i, j, k, s, t, q, prev.at(s, t, q)) * mu12 *
                                       d.iscale.mu_at(q);
                            }
                        }
                    }
                    const double v = z0.at(i, j, k) + acc;
                    check_finite(v, "Picard sweep");
                    next.at(i, j, k) = v;
                }
            }
        }
        if (next.values() == prev.values()) {
            return next;
        }
        prev = std::move(next);
    }
    throw Error(Errc::overflow, "Picard iteration failed to reach a fixpoint");
}

GridFunction2 solve_volterra_2d(const GridFunction2& a, const GridFunction2& f) {
    if (!a.same_shape(f)) {
        throw Error(Errc::shape_mismatch, "a and f tabulated on different grids");
    }
    const std::size_t n1 = a.n1(), n2 = a.n2();
    GridFunction2 u = a;
    std::vector<double> col(n2, 0.0);  // sum_{s<i} f(s,t) u(s,t) mu1(s)
    for (std::size_t i = 0; i < n1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            if (j > 0) {
                acc += col[j - 1] * a.t2().mu_at(j - 1);
            }
            const double v = a.at(i, j) + acc;
            check_finite(v, "forward substitution");
            u.at(i, j) = v;
        }
        const double mu1 = a.t1().mu_at(i);
        for (std::size_t j = 0; j < n2; ++j) {
            col[j] += f.at(i, j) * u.at(i, j) * mu1;
        }
    }
    return u;
}

namespace {

/// Guard for the dense residual paths, whose cost grows with the square of
/// the node count.
void check_dense_residual_size(const Domain3& d) {
    const std::size_t n = d.node_count();
    if (n > kMaxDenseResidualNodes) {
        throw Error(Errc::bad_parameter,
                    "grid with " + std::to_string(n) +
                        " nodes is too large for a dense residual (limit " +
                        std::to_string(kMaxDenseResidualNodes) + ")");
    }
}

/// Cumulative magnitude table S(i,j) = sum_{s<i, t<j, q} |v(s,t,q)| mu1 mu2 mu3.
std::vector<double> abs_cumulative_table(const GridFunction3& v) {
    const Domain3& d = v.domain();
    const std::size_t n1 = d.n1(), n2 = d.n2(), n3 = d.n3();
    std::vector<double> table(n1 * n2, 0.0);
    std::vector<double> colacc(n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j < n2; ++j) {
            acc += colacc[j - 1] * d.t2.mu_at(j - 1);
            table[i * n2 + j] = acc;
        }
        const double mu1 = d.t1.mu_at(i);
        for (std::size_t j = 0; j < n2; ++j) {
            double qsum = 0.0;
            for (std::size_t q = 0; q + 1 < n3; ++q) {
                qsum += std::abs(v.at(i, j, q)) * d.iscale.mu_at(q);
            }
            colacc[j] += qsum * mu1;
        }
    }
    return table;
}

} // namespace

GridFunction3 residual_k(const GridFunction3& g, const KernelSpec& kernel) {
    require_domain(g.domain(), kernel.domain(), "kernel");
    const Domain3& d = g.domain();

    if (const auto* lin = kernel.as_linear()) {
        // |F| factors as |r(x,y,z)| * |f(s,t,q) g(s,t,q)|, so the triple sum
        // reduces to one cumulative table of inner magnitudes.
        const std::vector<double> cumulative =
            abs_cumulative_table(pointwise_product(lin->f, g));
        GridFunction3 out = GridFunction3::constant(d, 0.0);
        for (std::size_t i = 0; i < d.n1(); ++i) {
            for (std::size_t j = 0; j < d.n2(); ++j) {
                const double s = cumulative[i * d.n2() + j];
                for (std::size_t k = 0; k < d.n3(); ++k) {
                    out.at(i, j, k) = std::abs(lin->r.at(i, j, k)) * s;
                }
            }
        }
        return out;
    }

    check_dense_residual_size(d);
    GridFunction3 out = GridFunction3::constant(d, 0.0);
    for (std::size_t i = 0; i < d.n1(); ++i) {
        for (std::size_t j = 0; j < d.n2(); ++j) {
            for (std::size_t k = 0; k < d.n3(); ++k) {
                double acc = 0.0;
                for (std::size_t s = 0; s < i; ++s) {
                    const double mu1 = d.t1.mu_at(s);
                    for (std::size_t t = 0; t < j; ++t) {
                        const double mu12 = mu1 * d.t2.mu_at(t);
                        for (std::size_t q = 0; q + 1 < d.n3(); ++q) {
                            acc += std::abs(kernel.eval(i, j, k, s, t, q, g.at(s, t, q))) * mu12 *
                                   d.iscale.mu_at(q);
                        }
                    }
                }
                check_finite(acc, "residual");
                out.at(i, j, k) = acc;
            }
        }
    }
    return out;
}

GridFunction3 residual_kbar(const GridFunction3& h, const KernelSpec& kernel_f,
                            const KernelSpec& kernel_g) {
    require_domain(h.domain(), kernel_f.domain(), "first kernel");
    require_domain(h.domain(), kernel_g.domain(), "second kernel");
    const Domain3& d = h.domain();
    check_dense_residual_size(d);
    GridFunction3 out = GridFunction3::constant(d, 0.0);
    for (std::size_t i = 0; i < d.n1(); ++i) {
        for (std::size_t j = 0; j < d.n2(); ++j) {
            for (std::size_t k = 0; k < d.n3(); ++k) {
                double acc = 0.0;
                for (std::size_t s = 0; s < i; ++s) {
                    const double mu1 = d.t1.mu_at(s);
                    for (std::size_t t = 0; t < j; ++t) {
                        const double mu12 = mu1 * d.t2.mu_at(t);
                        for (std::size_t q = 0; q + 1 < d.n3(); ++q) {
                            const double hv = h.at(s, t, q);
                            acc += std::abs(kernel_f.eval(i, j, k, s, t, q, hv) -
                                            kernel_g.eval(i, j, k, s, t, q, hv)) *
                                   mu12 * d.iscale.mu_at(q);
                        }
                    }
                }
                check_finite(acc, "residual");
                out.at(i, j, k) = acc;
            }
        }
    }
    return out;
}

namespace {

BoundReport build_report(std::vector<NodeRecord> nodes, double tol, ToleranceKind kind) {
    if (!(tol >= 0.0)) {
        throw Error(Errc::bad_parameter, "dominance tolerance must be >= 0");
    }
    BoundReport report;
    report.nodes = std::move(nodes);
    report.tol = tol;
    bool dominated = true;
    for (std::size_t n = 0; n < report.nodes.size(); ++n) {
        const NodeRecord& rec = report.nodes[n];
        const double eff_tol =
            kind == ToleranceKind::absolute
                ? tol
                : tol * std::max({1.0, std::abs(rec.subject), std::abs(rec.bound)});
        if (rec.margin < -eff_tol) {
            dominated = false;
        }
        const double violation = std::max(rec.subject - rec.bound, 0.0);
        if (n == 0 || violation > report.max_violation) {
            report.max_violation = violation;
            report.argmax_node = n;
        }
        if (n == 0 || rec.margin < report.min_margin) {
            report.min_margin = rec.margin;
            report.argmin_node = n;
        }
    }
    report.verdict = dominated ? Verdict::dominated : Verdict::violated;
    return report;
}

} // namespace

BoundReport check_dominance(const GridFunction3& subject, const GridFunction3& bound, double tol,
                            ToleranceKind kind) {
    if (!subject.same_shape(bound)) {
        throw Error(Errc::shape_mismatch, "subject and bound tabulated on different domains");
    }
    const Domain3& d = subject.domain();
    std::vector<NodeRecord> nodes;
    nodes.reserve(d.node_count());
    for (std::size_t i = 0; i < d.n1(); ++i) {
        for (std::size_t j = 0; j < d.n2(); ++j) {
            for (std::size_t k = 0; k < d.n3(); ++k) {
                NodeRecord rec;
                rec.i = i;
                rec.j = j;
                rec.k = k;
                rec.t1_value = d.t1[i];
                rec.t2_value = d.t2[j];
                rec.i_value = d.iscale[k];
                rec.subject = subject.at(i, j, k);
                rec.bound = bound.at(i, j, k);
                rec.margin = rec.bound - rec.subject;
                nodes.push_back(rec);
            }
        }
    }
    return build_report(std::move(nodes), tol, kind);
}

BoundReport check_dominance(const GridFunction2& subject, const GridFunction2& bound, double tol,
                            ToleranceKind kind) {
    if (!subject.same_shape(bound)) {
        throw Error(Errc::shape_mismatch, "subject and bound tabulated on different grids");
    }
    std::vector<NodeRecord> nodes;
    nodes.reserve(subject.n1() * subject.n2());
    for (std::size_t i = 0; i < subject.n1(); ++i) {
        for (std::size_t j = 0; j < subject.n2(); ++j) {
            NodeRecord rec;
            rec.i = i;
            rec.j = j;
            rec.t1_value = subject.t1()[i];
            rec.t2_value = subject.t2()[j];
            rec.subject = subject.at(i, j);
            rec.bound = bound.at(i, j);
            rec.margin = rec.bound - rec.subject;
            nodes.push_back(rec);
        }
    }
    return build_report(std::move(nodes), tol, kind);
}

} // namespace tsg
