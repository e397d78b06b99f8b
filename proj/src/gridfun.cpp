#include "tsg/gridfun.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace tsg {

namespace {

void check_nonnegative(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw Error(Errc::negative_input, "grid value at flat index " + std::to_string(i) +
                                                  " is negative: " + std::to_string(values[i]));
        }
    }
}

void check_shape(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw Error(Errc::shape_mismatch, "expected " + std::to_string(expected) +
                                              " grid values, got " + std::to_string(got));
    }
}

/// Reject expressions referencing variables outside the tabulation context.
void check_bindable(const Expression& rule, std::uint8_t bound_mask) {
    const std::uint8_t unbound = rule.free_var_mask() & static_cast<std::uint8_t>(~bound_mask);
    if (unbound == 0) {
        return;
    }
    for (unsigned v = 0; v < 6; ++v) {
        if (unbound & (1u << v)) {
            throw Error(Errc::expression_error,
                        "variable '" + std::string(var_name(static_cast<Var>(v))) +
                            "' is unbound in this tabulation context");
        }
    }
}

} // namespace

GridFunction2::GridFunction2(TimeScale t1, TimeScale t2, std::vector<double> values,
                             bool require_nonnegative)
    : t1_(std::move(t1)), t2_(std::move(t2)), values_(std::move(values)) {
    check_shape(t1_.size() * t2_.size(), values_.size());
    if (require_nonnegative) {
        check_nonnegative(values_);
    }
}

GridFunction2 GridFunction2::tabulate(const TimeScale& t1, const TimeScale& t2,
                                      const std::function<double(double, double)>& fn,
                                      bool require_nonnegative) {
    std::vector<double> vals(t1.size() * t2.size());
    std::size_t idx = 0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        for (std::size_t j = 0; j < t2.size(); ++j) {
            vals[idx++] = fn(t1[i], t2[j]);
        }
    }
    return GridFunction2(t1, t2, std::move(vals), require_nonnegative);
}

GridFunction2 GridFunction2::tabulate(const TimeScale& t1, const TimeScale& t2,
                                      const Expression& rule, bool require_nonnegative) {
    check_bindable(rule, EvalContext::mask_of(Var::x) | EvalContext::mask_of(Var::y));
    return tabulate(
        t1, t2,
        [&rule](double x, double y) {
            EvalContext ctx;
            ctx.bind(Var::x, x).bind(Var::y, y);
            return rule.eval(ctx);
        },
        require_nonnegative);
}

GridFunction2 GridFunction2::constant(const TimeScale& t1, const TimeScale& t2, double value) {
    return GridFunction2(t1, t2, std::vector<double>(t1.size() * t2.size(), value));
}

GridFunction3::GridFunction3(Domain3 domain, std::vector<double> values, bool require_nonnegative)
    : domain_(std::move(domain)), values_(std::move(values)) {
    check_shape(domain_.node_count(), values_.size());
    if (require_nonnegative) {
        check_nonnegative(values_);
    }
}

GridFunction3 GridFunction3::tabulate(const Domain3& domain,
                                      const std::function<double(double, double, double)>& fn,
                                      bool require_nonnegative) {
    std::vector<double> vals(domain.node_count());
    std::size_t idx = 0;
    for (std::size_t i = 0; i < domain.n1(); ++i) {
        for (std::size_t j = 0; j < domain.n2(); ++j) {
            for (std::size_t k = 0; k < domain.n3(); ++k) {
                vals[idx++] = fn(domain.t1[i], domain.t2[j], domain.iscale[k]);
            }
        }
    }
    return GridFunction3(domain, std::move(vals), require_nonnegative);
}

GridFunction3 GridFunction3::tabulate(const Domain3& domain, const Expression& rule,
                                      bool require_nonnegative) {
    check_bindable(rule, EvalContext::mask_of(Var::x) | EvalContext::mask_of(Var::y) |
                             EvalContext::mask_of(Var::z));
    return tabulate(
        domain,
        [&rule](double x, double y, double z) {
            EvalContext ctx;
            ctx.bind(Var::x, x).bind(Var::y, y).bind(Var::z, z);
            return rule.eval(ctx);
        },
        require_nonnegative);
}

GridFunction3 GridFunction3::constant(const Domain3& domain, double value) {
    return GridFunction3(domain, std::vector<double>(domain.node_count(), value));
}

GridFunction3 pointwise_product(const GridFunction3& f, const GridFunction3& g) {
    if (!f.same_shape(g)) {
        throw Error(Errc::shape_mismatch, "pointwise product of differently shaped grids");
    }
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = f.values()[n] * g.values()[n];
    }
    return GridFunction3(f.domain(), std::move(vals));
}

GridFunction3 pointwise_sum(const GridFunction3& f, const GridFunction3& g) {
    if (!f.same_shape(g)) {
        throw Error(Errc::shape_mismatch, "pointwise sum of differently shaped grids");
    }
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = f.values()[n] + g.values()[n];
    }
    return GridFunction3(f.domain(), std::move(vals));
}

GridFunction3 pointwise_abs(const GridFunction3& f) {
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = std::abs(f.values()[n]);
    }
    return GridFunction3(f.domain(), std::move(vals));
}

GridFunction2 pointwise_abs(const GridFunction2& f) {
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = std::abs(f.values()[n]);
    }
    return GridFunction2(f.t1(), f.t2(), std::move(vals));
}

GridFunction3 pointwise_abs_diff(const GridFunction3& f, const GridFunction3& g) {
    if (!f.same_shape(g)) {
        throw Error(Errc::shape_mismatch, "pointwise difference of differently shaped grids");
    }
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = std::abs(f.values()[n] - g.values()[n]);
    }
    return GridFunction3(f.domain(), std::move(vals));
}

GridFunction2 pointwise_abs_diff(const GridFunction2& f, const GridFunction2& g) {
    if (!f.same_shape(g)) {
        throw Error(Errc::shape_mismatch, "pointwise difference of differently shaped grids");
    }
    std::vector<double> vals(f.values().size());
    for (std::size_t n = 0; n < vals.size(); ++n) {
        vals[n] = std::abs(f.values()[n] - g.values()[n]);
    }
    return GridFunction2(f.t1(), f.t2(), std::move(vals));
}

double triple_cumulative(const GridFunction3& f, double x, double y) {
    const Domain3& d = f.domain();
    const std::size_t ix = d.t1.index_of(x);
    const std::size_t jy = d.t2.index_of(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < ix; ++i) {
        const double mu1 = d.t1.mu_at(i);
        for (std::size_t j = 0; j < jy; ++j) {
            const double mu12 = mu1 * d.t2.mu_at(j);
            for (std::size_t k = 0; k + 1 < d.n3(); ++k) {
                acc += f.at(i, j, k) * mu12 * d.iscale.mu_at(k);
            }
        }
    }
    return acc;
}

double inner_double(const GridFunction3& f, double s_fixed, double y) {
    const Domain3& d = f.domain();
    const std::size_t is = d.t1.index_of(s_fixed);
    const std::size_t jy = d.t2.index_of(y);
    double acc = 0.0;
    for (std::size_t j = 0; j < jy; ++j) {
        const double mu2 = d.t2.mu_at(j);
        for (std::size_t k = 0; k + 1 < d.n3(); ++k) {
            acc += f.at(is, j, k) * mu2 * d.iscale.mu_at(k);
        }
    }
    return acc;
}

} // namespace tsg
