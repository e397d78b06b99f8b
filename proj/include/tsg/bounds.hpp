#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsg/gridfun.hpp"

namespace tsg {

/// Dominance verdict for a (subject, bound) pair. `hypothesis_unverified`
/// is applied by the drivers when a bound was computed with hypothesis
/// checking overridden and at least one hypothesis actually fails: the
/// margins are still reported but the inequality carries no guarantee.
enum class Verdict { dominated, violated, hypothesis_unverified };

std::string_view verdict_name(Verdict v);

/// One grid node of a dominance comparison.
struct NodeRecord {
    std::size_t i = 0, j = 0, k = 0;  // k fixed at 0 for two-variable grids
    double t1_value = 0.0, t2_value = 0.0, i_value = 0.0;
    double subject = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - subject
};

/// Pointwise margins plus the aggregate verdict of a dominance check.
struct BoundReport {
    std::vector<NodeRecord> nodes;  // lexicographic (i, j, k) order
    Verdict verdict = Verdict::dominated;
    double tol = 0.0;              // tolerance the verdict was computed with
    double max_violation = 0.0;    // max(subject - bound, 0) over all nodes
    std::size_t argmax_node = 0;   // index into nodes of the worst violation
    double min_margin = 0.0;
    std::size_t argmin_node = 0;   // index into nodes of the smallest margin
};

struct BoundOptions {
    /// When true (the default), hypothesis failures throw NegativeInput /
    /// HypothesisViolated. When false the bound is computed regardless; the
    /// caller is responsible for downgrading the verdict.
    bool check_hypotheses = true;
};

struct HypothesisIssue {
    Errc code;
    std::string detail;
};

// Hypothesis scans, one per bound. Empty result means all hypotheses hold.
std::vector<HypothesisIssue> lemma_hypothesis_issues(const GridFunction2& a,
                                                     const GridFunction2& f);
std::vector<HypothesisIssue> thm21_hypothesis_issues(const GridFunction3& p1,
                                                     const GridFunction3& p2,
                                                     const GridFunction3& f);
std::vector<HypothesisIssue> thm31_hypothesis_issues(const GridFunction3& r,
                                                     const GridFunction3& f);
std::vector<HypothesisIssue> thm32_hypothesis_issues(const GridFunction3& r,
                                                     const GridFunction3& f,
                                                     const GridFunction3& k);
std::vector<HypothesisIssue> thm33_hypothesis_issues(const GridFunction3& gbar,
                                                     const GridFunction3& kbar,
                                                     const GridFunction3& r,
                                                     const GridFunction3& f);

/// Two-variable Gronwall bound: for u <= a + int int f*u with a >= 0
/// nondecreasing in each variable and f >= 0, every solution satisfies
/// u(x, y) <= a(x, y) * e_{alpha_y}(x, x0) where the exponent coefficient at
/// row s is alpha_y(s) = int_{y0}^{y} f(s, t) dt. On the faces x = x0 and
/// y = y0 the bound equals a exactly.
GridFunction2 lemma_bound(const GridFunction2& a, const GridFunction2& f,
                          const BoundOptions& opts = {});

/// Three-variable bound for u <= p1 + p2 * int int int f*u:
///   bound(x, y, z) = p1(x, y, z) + p2(x, y, z) * C(x, y) * E(x, y)
/// with C(x, y) the triple cumulative of f*p1 and E(x, y) the time-scale
/// exponential along t1 at (x, x0) whose coefficient at row s is the inner
/// double integral of f*p2 at (s, y). Equals p1 exactly on the x = x0 and
/// y = y0 faces; requires p1, p2, f >= 0.
GridFunction3 thm21_bound(const GridFunction3& p1, const GridFunction3& p2,
                          const GridFunction3& f, const BoundOptions& opts = {});

/// Solution estimate |u| <= |g| + r * C2 * E2 for dynamic integral equations
/// whose kernel is enveloped by r(x,y,z) * f(s,t,q) * |u|. Identical to
/// thm21_bound with p1 = |g| and p2 = r, node for node.
GridFunction3 thm31_estimate(const GridFunction3& g, const GridFunction3& r,
                             const GridFunction3& f, const BoundOptions& opts = {});

/// Approximation error estimate |u - g| <= k + r * C3 * E2 under the
/// Lipschitz-type kernel condition, where k is the caller-supplied residual
/// of the trial function g (see oracle::residual_k for built-in kernels).
GridFunction3 thm32_estimate(const GridFunction3& g, const GridFunction3& r,
                             const GridFunction3& f, const GridFunction3& k,
                             const BoundOptions& opts = {});

/// Distance estimate |u - h| <= (gbar + kbar) + r * C4 * E2 between the
/// solutions of two integral equations, with gbar = |g - v| and kbar the
/// kernel-discrepancy residual (oracle::residual_kbar).
GridFunction3 thm33_estimate(const GridFunction3& gbar, const GridFunction3& kbar,
                             const GridFunction3& r, const GridFunction3& f,
                             const BoundOptions& opts = {});

} // namespace tsg
