#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tsg/calculus.hpp"

using namespace tsg;
using tsg::testsupport::close_rel;

namespace {

ScaleFunction ones(const TimeScale& ts) {
    return ScaleFunction::constant(ts, 1.0);
}

} // namespace

TEST_CASE("delta integral of a constant is the span") {
    const TimeScale ts = TimeScale::from_points({0.0, 1.0, 3.0});
    CHECK(delta_integral(ones(ts), 0.0, 3.0) == 3.0);
}

TEST_CASE("delta integral left-rule sum") {
    // f(t) = t on {0,1,2,3}: 0*1 + 1*1 + 2*1 = 3 (the upper endpoint is
    // excluded by the half-open range)
    const TimeScale ts = TimeScale::integers(0, 3);
    const ScaleFunction f = ScaleFunction::tabulate(ts, [](double t) { return t; });
    CHECK(delta_integral(f, 0.0, 3.0) == 3.0);
}

TEST_CASE("delta integral over an empty range is zero") {
    const TimeScale ts = TimeScale::integers(0, 3);
    const ScaleFunction f = ScaleFunction::tabulate(ts, [](double t) { return t * t + 1.0; });
    CHECK(delta_integral(f, 1.0, 1.0) == 0.0);
}

TEST_CASE("delta integral additivity is exact on integer-valued data") {
    // Integer values and unit steps add without rounding, so splitting the
    // range cannot change the result at all.
    const TimeScale ts = TimeScale::integers(0, 8);
    const ScaleFunction f =
        ScaleFunction::tabulate(ts, [](double t) { return 3.0 * t - 7.0; });
    for (std::size_t m = 0; m < ts.size(); ++m) {
        CHECK(delta_integral(f, ts.min(), ts[m]) + delta_integral(f, ts[m], ts.max()) ==
              delta_integral(f, ts.min(), ts.max()));
    }
}

TEST_CASE("delta integral rejects bad ranges") {
    const TimeScale ts = TimeScale::integers(0, 3);
    const ScaleFunction f = ones(ts);
    CHECK_THROWS_AS(delta_integral(f, 2.0, 1.0), Error);
    CHECK_THROWS_AS(delta_integral(f, 0.5, 1.0), Error);
    try {
        delta_integral(f, 2.0, 1.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::reversed_range);
    }
}

TEST_CASE("scale function construction checks") {
    const TimeScale ts = TimeScale::integers(0, 2);
    CHECK_THROWS_AS(ScaleFunction(ts, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(ScaleFunction(ts, {1.0, -2.0, 0.0}, /*require_nonnegative=*/true), Error);
    CHECK_NOTHROW(ScaleFunction(ts, {1.0, 2.0, 0.0}, /*require_nonnegative=*/true));
}

TEST_CASE("delta exponential product formula") {
    SUBCASE("constant coefficient on integers: (1+p)^(t-t0)") {
        const TimeScale ts = TimeScale::integers(0, 3);
        CHECK(delta_exp(ones(ts), 3.0, 0.0) == 8.0);
    }
    SUBCASE("uniform scale with mu = 0.5") {
        const TimeScale ts = TimeScale::uniform(0.0, 1.0, 2);
        CHECK(delta_exp(ones(ts), 1.0, 0.0) == 2.25);
    }
    SUBCASE("empty range gives one") {
        const TimeScale ts = TimeScale::integers(0, 3);
        CHECK(delta_exp(ones(ts), 0.0, 0.0) == 1.0);
    }
    SUBCASE("(1 + 1/n)^n converges to e, error shrinking monotonically") {
        double prev_err = 1e9;
        for (int k = 1; k <= 12; ++k) {
            const std::size_t n = std::size_t{1} << k;
            const TimeScale ts = TimeScale::uniform(0.0, 1.0, n);
            const double err = std::abs(delta_exp(ones(ts), 1.0, 0.0) - std::exp(1.0));
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 4e-4);
    }
}

TEST_CASE("regressivity guard") {
    const TimeScale ts = TimeScale::integers(0, 2);
    SUBCASE("zero coefficient is regressive") {
        CHECK(is_positively_regressive(ScaleFunction::constant(ts, 0.0), 0.0, 2.0));
    }
    SUBCASE("nonnegative coefficients are regressive") {
        CHECK(is_positively_regressive(ScaleFunction::constant(ts, 3.5), 0.0, 2.0));
    }
    SUBCASE("p = -1 with mu = 1 sits on the boundary") {
        const ScaleFunction p = ScaleFunction::constant(ts, -1.0);
        CHECK_FALSE(is_positively_regressive(p, 0.0, 2.0));
        CHECK_THROWS_AS(delta_exp(p, 2.0, 0.0), Error);
    }
    SUBCASE("mildly negative but regressive coefficient works") {
        const ScaleFunction p = ScaleFunction::constant(ts, -0.5);
        CHECK(is_positively_regressive(p, 0.0, 2.0));
        CHECK(delta_exp(p, 2.0, 0.0) == 0.25);
    }
}

TEST_CASE("delta exponential overflow is reported") {
    const TimeScale ts = TimeScale::integers(0, 5);
    const ScaleFunction p = ScaleFunction::constant(ts, 1e200);
    CHECK_THROWS_AS(delta_exp(p, 5.0, 0.0), Error);
}

TEST_CASE("calculus properties on random data") {
    Rng rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const TimeScale ts = random_scale(rng, 10);
        std::vector<double> fv(ts.size()), gv(ts.size()), pv(ts.size()), qv(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            fv[i] = rng.uniform(-2.0, 2.0);
            gv[i] = rng.uniform(-2.0, 2.0);
            pv[i] = rng.uniform(0.0, 2.0);
            qv[i] = pv[i] + rng.uniform(0.0, 1.0);  // q >= p >= 0
        }
        const ScaleFunction f(ts, fv), g(ts, gv), p(ts, pv), q(ts, qv);
        const double lo = ts.min(), hi = ts.max();
        const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);

        // Linearity
        std::vector<double> combo(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            combo[i] = alpha * fv[i] + beta * gv[i];
        }
        CHECK(close_rel(delta_integral(ScaleFunction(ts, combo), lo, hi),
                        alpha * delta_integral(f, lo, hi) + beta * delta_integral(g, lo, hi),
                        1e-12));

        // Additivity: identical summands, so agreement holds to a couple of
        // ulps (the two sides associate the additions differently)
        const double mid = ts[ts.size() / 2];
        CHECK(close_rel(delta_integral(f, lo, mid) + delta_integral(f, mid, hi),
                        delta_integral(f, lo, hi), 1e-15));

        // Exponential semigroup
        CHECK(close_rel(delta_exp(p, hi, lo), delta_exp(p, hi, mid) * delta_exp(p, mid, lo),
                        1e-12));

        // Positivity and monotone growth in t for p >= 0
        double prev = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double e = delta_exp(p, ts[i], lo);
            CHECK(e >= 1.0);
            if (i > 0) CHECK(e >= prev);
            prev = e;
        }

        // Monotonicity in the coefficient
        CHECK(delta_exp(p, hi, lo) <= delta_exp(q, hi, lo));
    }
}

TEST_CASE("continuum consistency of the exponential") {
    // On refinements of [0,1], e_p(1,0) for constant p approaches exp(p)
    // with first-order error.
    const double p_val = 0.7;
    const TimeScale base = TimeScale::uniform(0.0, 1.0, 1);
    double prev_err = 1e9;
    for (int k = 1; k <= 14; ++k) {
        const TimeScale ts = base.refine(std::size_t{1} << k);
        const double e = delta_exp(ScaleFunction::constant(ts, p_val), 1.0, 0.0);
        const double err = std::abs(e - std::exp(p_val));
        CHECK(err < prev_err);
        // first order: halving the step roughly halves the error
        if (k > 6) {
            CHECK(prev_err / err == doctest::Approx(2.0).epsilon(0.1));
        }
        prev_err = err;
    }
}
