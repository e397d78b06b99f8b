#include "tsg/bounds.hpp"

#include <cmath>
#include <string>

namespace tsg {

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::dominated: return "dominated";
        case Verdict::violated: return "violated";
        case Verdict::hypothesis_unverified: return "hypothesis-unverified";
    }
    return "?";
}

namespace {

void scan_nonnegative(const GridFunction3& g, const char* name,
                      std::vector<HypothesisIssue>& out) {
    const auto& vals = g.values();
    for (std::size_t n = 0; n < vals.size(); ++n) {
        if (!(vals[n] >= 0.0)) {
            out.push_back({Errc::negative_input,
                           std::string(name) + " has a negative value " +
                               std::to_string(vals[n]) + " at flat index " + std::to_string(n)});
            return;
        }
    }
}

void scan_nonnegative(const GridFunction2& g, const char* name,
                      std::vector<HypothesisIssue>& out) {
    const auto& vals = g.values();
    for (std::size_t n = 0; n < vals.size(); ++n) {
        if (!(vals[n] >= 0.0)) {
            out.push_back({Errc::negative_input,
                           std::string(name) + " has a negative value " +
                               std::to_string(vals[n]) + " at flat index " + std::to_string(n)});
            return;
        }
    }
}

void scan_nondecreasing(const GridFunction2& a, std::vector<HypothesisIssue>& out) {
    for (std::size_t i = 0; i < a.n1(); ++i) {
        for (std::size_t j = 0; j < a.n2(); ++j) {
            if (i + 1 < a.n1() && a.at(i + 1, j) < a.at(i, j)) {
                out.push_back({Errc::hypothesis_violated,
                               "a is decreasing in the first variable between rows " +
                                   std::to_string(i) + " and " + std::to_string(i + 1) +
                                   " at column " + std::to_string(j)});
                return;
            }
            if (j + 1 < a.n2() && a.at(i, j + 1) < a.at(i, j)) {
                out.push_back({Errc::hypothesis_violated,
                               "a is decreasing in the second variable between columns " +
                                   std::to_string(j) + " and " + std::to_string(j + 1) +
                                   " at row " + std::to_string(i)});
                return;
            }
        }
    }
}

void require_same_domain(const GridFunction3& a, const GridFunction3& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(Errc::shape_mismatch, std::string(what) + " tabulated on different domains");
    }
}

void enforce(const std::vector<HypothesisIssue>& issues, const BoundOptions& opts) {
    if (opts.check_hypotheses && !issues.empty()) {
        throw Error(issues.front().code, issues.front().detail);
    }
}

double checked_product_factor(double mu, double coef, double point) {
    const double factor = 1.0 + mu * coef;
    if (!(factor > 0.0)) {
        throw Error(Errc::not_regressive, "exponent factor 1 + mu*coef = " +
                                              std::to_string(factor) + " at point " +
                                              std::to_string(point));
    }
    return factor;
}

/// z-sums of one grid: out(i,j) = sum_q g(i,j,q) * mu3(q).
std::vector<double> layer_sums(const GridFunction3& g) {
    const Domain3& d = g.domain();
    const std::size_t n1 = d.n1(), n2 = d.n2(), n3 = d.n3();
    std::vector<double> out(n1 * n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            double acc = 0.0;
            for (std::size_t q = 0; q + 1 < n3; ++q) {
                acc += g.at(i, j, q) * d.iscale.mu_at(q);
            }
            out[i * n2 + j] = acc;
        }
    }
    return out;
}

/// Shared core of the three-variable bounds:
///   z0 + mult * C(x,y) * E(x,y),
/// C the triple cumulative of f*z0, E the exponential along t1 whose row-s
/// coefficient is the inner double of f*mult at (s, y). Both tables are
/// assembled from running prefix sums (additions only), so the whole bound
/// costs one pass over the grid and the x = x0 / y = y0 faces come out as
/// exact zeros.
GridFunction3 gronwall3_core(const GridFunction3& z0, const GridFunction3& mult,
                             const GridFunction3& f) {
    require_same_domain(z0, mult, "bound inputs");
    require_same_domain(z0, f, "bound inputs");
    const Domain3& d = z0.domain();
    const std::size_t n1 = d.n1(), n2 = d.n2(), n3 = d.n3();

    const std::vector<double> qz0 = layer_sums(pointwise_product(f, z0));
    const std::vector<double> qmult = layer_sums(pointwise_product(f, mult));

    // btab(i,j) = inner double of f*mult at (t1[i], t2[j]): prefix along j.
    std::vector<double> btab(n1 * n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j < n2; ++j) {
            acc += qmult[i * n2 + j - 1] * d.t2.mu_at(j - 1);
            btab[i * n2 + j] = acc;
        }
    }

    // ctab(i,j) = triple cumulative of f*z0: column accumulators over rows,
    // prefixed along each row.
    std::vector<double> ctab(n1 * n2, 0.0);
    std::vector<double> colacc(n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j < n2; ++j) {
            acc += colacc[j - 1] * d.t2.mu_at(j - 1);
            ctab[i * n2 + j] = acc;
        }
        const double mu1 = d.t1.mu_at(i);
        for (std::size_t j = 0; j < n2; ++j) {
            colacc[j] += qz0[i * n2 + j] * mu1;
        }
    }

    // etab(i,j) = product over s < i of (1 + mu1(s) * btab(s,j)).
    std::vector<double> etab(n1 * n2, 1.0);
    for (std::size_t j = 0; j < n2; ++j) {
        double e_acc = 1.0;
        for (std::size_t i = 0; i < n1; ++i) {
            etab[i * n2 + j] = e_acc;
            if (i + 1 < n1) {
                e_acc *= checked_product_factor(d.t1.mu_at(i), btab[i * n2 + j], d.t1[i]);
                if (!std::isfinite(e_acc)) {
                    throw Error(Errc::overflow, "bound accumulation left the finite range");
                }
            }
        }
    }

    std::vector<double> vals(d.node_count());
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double correction = ctab[i * n2 + j] * etab[i * n2 + j];
            for (std::size_t k = 0; k < n3; ++k) {
                const std::size_t idx = (i * n2 + j) * n3 + k;
                const double v = z0.values()[idx] + mult.values()[idx] * correction;
                if (!std::isfinite(v)) {
                    throw Error(Errc::overflow, "bound value left the finite range");
                }
                vals[idx] = v;
            }
        }
    }
    return GridFunction3(d, std::move(vals));
}

} // namespace

std::vector<HypothesisIssue> lemma_hypothesis_issues(const GridFunction2& a,
                                                     const GridFunction2& f) {
    std::vector<HypothesisIssue> issues;
    scan_nonnegative(a, "a", issues);
    scan_nonnegative(f, "f", issues);
    scan_nondecreasing(a, issues);
    return issues;
}

std::vector<HypothesisIssue> thm21_hypothesis_issues(const GridFunction3& p1,
                                                     const GridFunction3& p2,
                                                     const GridFunction3& f) {
    std::vector<HypothesisIssue> issues;
    scan_nonnegative(p1, "p1", issues);
    scan_nonnegative(p2, "p2", issues);
    scan_nonnegative(f, "f", issues);
    return issues;
}

std::vector<HypothesisIssue> thm31_hypothesis_issues(const GridFunction3& r,
                                                     const GridFunction3& f) {
    std::vector<HypothesisIssue> issues;
    scan_nonnegative(r, "r", issues);
    scan_nonnegative(f, "f", issues);
    return issues;
}

std::vector<HypothesisIssue> thm32_hypothesis_issues(const GridFunction3& r,
                                                     const GridFunction3& f,
                                                     const GridFunction3& k) {
    std::vector<HypothesisIssue> issues;
    scan_nonnegative(r, "r", issues);
    scan_nonnegative(f, "f", issues);
    scan_nonnegative(k, "k", issues);
    return issues;
}

std::vector<HypothesisIssue> thm33_hypothesis_issues(const GridFunction3& gbar,
                                                     const GridFunction3& kbar,
                                                     const GridFunction3& r,
                                                     const GridFunction3& f) {
    std::vector<HypothesisIssue> issues;
    scan_nonnegative(gbar, "gbar", issues);
    scan_nonnegative(kbar, "kbar", issues);
    scan_nonnegative(r, "r", issues);
    scan_nonnegative(f, "f", issues);
    return issues;
}

GridFunction2 lemma_bound(const GridFunction2& a, const GridFunction2& f,
                          const BoundOptions& opts) {
    if (!a.same_shape(f)) {
        throw Error(Errc::shape_mismatch, "a and f tabulated on different grids");
    }
    enforce(lemma_hypothesis_issues(a, f), opts);

    const std::size_t n1 = a.n1(), n2 = a.n2();

    // alpha(i,j) = integral of f(i, .) over [y0, t2[j]), prefixed along j.
    std::vector<double> alpha(n1 * n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j < n2; ++j) {
            acc += f.at(i, j - 1) * a.t2().mu_at(j - 1);
            alpha[i * n2 + j] = acc;
        }
    }

    std::vector<double> vals(n1 * n2);
    for (std::size_t j = 0; j < n2; ++j) {
        double e_acc = 1.0;
        for (std::size_t i = 0; i < n1; ++i) {
            vals[i * n2 + j] = a.at(i, j) * e_acc;
            if (i + 1 < n1) {
                e_acc *= checked_product_factor(a.t1().mu_at(i), alpha[i * n2 + j], a.t1()[i]);
                if (!std::isfinite(e_acc)) {
                    throw Error(Errc::overflow, "bound accumulation left the finite range");
                }
            }
        }
    }
    return GridFunction2(a.t1(), a.t2(), std::move(vals));
}

GridFunction3 thm21_bound(const GridFunction3& p1, const GridFunction3& p2,
                          const GridFunction3& f, const BoundOptions& opts) {
    enforce(thm21_hypothesis_issues(p1, p2, f), opts);
    return gronwall3_core(p1, p2, f);
}

GridFunction3 thm31_estimate(const GridFunction3& g, const GridFunction3& r,
                             const GridFunction3& f, const BoundOptions& opts) {
    enforce(thm31_hypothesis_issues(r, f), opts);
    return gronwall3_core(pointwise_abs(g), r, f);
}

GridFunction3 thm32_estimate(const GridFunction3& g, const GridFunction3& r,
                             const GridFunction3& f, const GridFunction3& k,
                             const BoundOptions& opts) {
    require_same_domain(g, k, "g and k");
    enforce(thm32_hypothesis_issues(r, f, k), opts);
    return gronwall3_core(k, r, f);
}

GridFunction3 thm33_estimate(const GridFunction3& gbar, const GridFunction3& kbar,
                             const GridFunction3& r, const GridFunction3& f,
                             const BoundOptions& opts) {
    require_same_domain(gbar, kbar, "gbar and kbar");
    enforce(thm33_hypothesis_issues(gbar, kbar, r, f), opts);
    return gronwall3_core(pointwise_sum(gbar, kbar), r, f);
}

} // namespace tsg
