#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tsg/expression.hpp"
#include "tsg/timescale.hpp"

namespace tsg {

/// The product domain H = T1 x T2 x I of three finite scales. Integration
/// always starts at the origin (x0, y0) = (min T1, min T2) and the third
/// coordinate is always integrated over the whole of I = [a, b], so the
/// domain stores nothing beyond the scales themselves.
struct Domain3 {
    TimeScale t1;
    TimeScale t2;
    TimeScale iscale;

    [[nodiscard]] double x0() const noexcept { return t1.min(); }
    [[nodiscard]] double y0() const noexcept { return t2.min(); }
    [[nodiscard]] double a() const noexcept { return iscale.min(); }
    [[nodiscard]] double b() const noexcept { return iscale.max(); }
    [[nodiscard]] std::size_t n1() const noexcept { return t1.size(); }
    [[nodiscard]] std::size_t n2() const noexcept { return t2.size(); }
    [[nodiscard]] std::size_t n3() const noexcept { return iscale.size(); }
    [[nodiscard]] std::size_t node_count() const noexcept { return n1() * n2() * n3(); }

    bool operator==(const Domain3& other) const noexcept = default;
};

/// Real-valued function tabulated on T1 x T2, row-major in (i, j).
class GridFunction2 {
public:
    GridFunction2(TimeScale t1, TimeScale t2, std::vector<double> values,
                  bool require_nonnegative = false);

    static GridFunction2 tabulate(const TimeScale& t1, const TimeScale& t2,
                                  const std::function<double(double, double)>& fn,
                                  bool require_nonnegative = false);

    /// Evaluate an expression at every node, binding x and y. Throws
    /// ExpressionError if the expression references any other variable.
    static GridFunction2 tabulate(const TimeScale& t1, const TimeScale& t2,
                                  const Expression& rule, bool require_nonnegative = false);

    static GridFunction2 constant(const TimeScale& t1, const TimeScale& t2, double value);

    [[nodiscard]] const TimeScale& t1() const noexcept { return t1_; }
    [[nodiscard]] const TimeScale& t2() const noexcept { return t2_; }
    [[nodiscard]] std::size_t n1() const noexcept { return t1_.size(); }
    [[nodiscard]] std::size_t n2() const noexcept { return t2_.size(); }

    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept {
        return values_[i * n2() + j];
    }
    double& at(std::size_t i, std::size_t j) noexcept { return values_[i * n2() + j]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] bool same_shape(const GridFunction2& other) const noexcept {
        return t1_ == other.t1_ && t2_ == other.t2_;
    }

private:
    TimeScale t1_;
    TimeScale t2_;
    std::vector<double> values_;
};

/// Real-valued function tabulated on a Domain3, row-major in (i, j, k).
class GridFunction3 {
public:
    GridFunction3(Domain3 domain, std::vector<double> values, bool require_nonnegative = false);

    static GridFunction3 tabulate(const Domain3& domain,
                                  const std::function<double(double, double, double)>& fn,
                                  bool require_nonnegative = false);

    /// Evaluate an expression at every node, binding x, y and z. Throws
    /// ExpressionError if the expression references any other variable.
    static GridFunction3 tabulate(const Domain3& domain, const Expression& rule,
                                  bool require_nonnegative = false);

    static GridFunction3 constant(const Domain3& domain, double value);

    [[nodiscard]] const Domain3& domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t n1() const noexcept { return domain_.n1(); }
    [[nodiscard]] std::size_t n2() const noexcept { return domain_.n2(); }
    [[nodiscard]] std::size_t n3() const noexcept { return domain_.n3(); }

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return (i * n2() + j) * n3() + k;
    }
    [[nodiscard]] double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return values_[index(i, j, k)];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return values_[index(i, j, k)];
    }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] bool same_shape(const GridFunction3& other) const noexcept {
        return domain_ == other.domain_;
    }

private:
    Domain3 domain_;
    std::vector<double> values_;
};

// Pointwise combinators shared by the bound formulas and the oracle.

GridFunction3 pointwise_product(const GridFunction3& f, const GridFunction3& g);
GridFunction3 pointwise_sum(const GridFunction3& f, const GridFunction3& g);
GridFunction3 pointwise_abs(const GridFunction3& f);
GridFunction2 pointwise_abs(const GridFunction2& f);
GridFunction3 pointwise_abs_diff(const GridFunction3& f, const GridFunction3& g);
GridFunction2 pointwise_abs_diff(const GridFunction2& f, const GridFunction2& g);

/// Full cumulative triple integral from the origin,
///   int_{x0}^{x} int_{y0}^{y} int_{a}^{b} f(s, tau, q) dq dtau ds,
/// as the exact sum over s < x, tau < y, q < b weighted by the three
/// graininess factors. Zero when x = x0 or y = y0.
double triple_cumulative(const GridFunction3& f, double x, double y);

/// Inner double integral at a fixed first coordinate,
///   int_{y0}^{y} int_{a}^{b} f(s_fixed, tau, q) dq dtau.
double inner_double(const GridFunction3& f, double s_fixed, double y);

} // namespace tsg
