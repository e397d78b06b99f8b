#include "tsg/runner.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <thread>
#include <utility>

namespace tsg {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string node_triple(const NodeRecord& rec) {
    return "(" + std::to_string(rec.i) + "," + std::to_string(rec.j) + "," +
           std::to_string(rec.k) + ")";
}

// ============================================================================
// Report rendering
// ============================================================================

std::string render_report_csv(const BoundReport& report) {
    std::string out = "i,j,k,t1_value,t2_value,i_value,subject,bound,margin\n";
    for (const NodeRecord& rec : report.nodes) {
        out += std::to_string(rec.i) + ',' + std::to_string(rec.j) + ',' + std::to_string(rec.k) +
               ',' + format_double(rec.t1_value) + ',' + format_double(rec.t2_value) + ',' +
               format_double(rec.i_value) + ',' + format_double(rec.subject) + ',' +
               format_double(rec.bound) + ',' + format_double(rec.margin) + '\n';
    }
    return out;
}

std::string render_report_jsonl(const BoundReport& report, Verdict effective) {
    std::string out;
    for (const NodeRecord& rec : report.nodes) {
        out += "{\"i\":" + std::to_string(rec.i) + ",\"j\":" + std::to_string(rec.j) +
               ",\"k\":" + std::to_string(rec.k) + ",\"t1_value\":" + format_double(rec.t1_value) +
               ",\"t2_value\":" + format_double(rec.t2_value) +
               ",\"i_value\":" + format_double(rec.i_value) +
               ",\"subject\":" + format_double(rec.subject) +
               ",\"bound\":" + format_double(rec.bound) +
               ",\"margin\":" + format_double(rec.margin) + "}\n";
    }
    const NodeRecord& worst = report.nodes[report.argmin_node];
    const NodeRecord& viol = report.nodes[report.argmax_node];
    out += std::string("{\"verdict\":\"") + std::string(verdict_name(effective)) +
           "\",\"tol\":" + format_double(report.tol) +
           ",\"nodes\":" + std::to_string(report.nodes.size()) +
           ",\"min_margin\":" + format_double(report.min_margin) + ",\"argmin\":[" +
           std::to_string(worst.i) + ',' + std::to_string(worst.j) + ',' +
           std::to_string(worst.k) + "],\"max_violation\":" +
           format_double(report.max_violation) + ",\"argmax\":[" + std::to_string(viol.i) + ',' +
           std::to_string(viol.j) + ',' + std::to_string(viol.k) + "]}\n";
    return out;
}

struct SolutionRow {
    std::size_t i = 0, j = 0, k = 0;
    double t1_value = 0.0, t2_value = 0.0, i_value = 0.0;
    double value = 0.0;
};

std::vector<SolutionRow> solution_rows(const GridFunction3& u) {
    std::vector<SolutionRow> rows;
    rows.reserve(u.domain().node_count());
    for (std::size_t i = 0; i < u.n1(); ++i) {
        for (std::size_t j = 0; j < u.n2(); ++j) {
            for (std::size_t k = 0; k < u.n3(); ++k) {
                rows.push_back({i, j, k, u.domain().t1[i], u.domain().t2[j], u.domain().iscale[k],
                                u.at(i, j, k)});
            }
        }
    }
    return rows;
}

std::vector<SolutionRow> solution_rows(const GridFunction2& u) {
    std::vector<SolutionRow> rows;
    rows.reserve(u.n1() * u.n2());
    for (std::size_t i = 0; i < u.n1(); ++i) {
        for (std::size_t j = 0; j < u.n2(); ++j) {
            rows.push_back({i, j, 0, u.t1()[i], u.t2()[j], 0.0, u.at(i, j)});
        }
    }
    return rows;
}

std::string render_solution(const std::vector<SolutionRow>& rows, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::csv) {
        out = "i,j,k,t1_value,t2_value,i_value,value\n";
        for (const SolutionRow& r : rows) {
            out += std::to_string(r.i) + ',' + std::to_string(r.j) + ',' + std::to_string(r.k) +
                   ',' + format_double(r.t1_value) + ',' + format_double(r.t2_value) + ',' +
                   format_double(r.i_value) + ',' + format_double(r.value) + '\n';
        }
    } else {
        for (const SolutionRow& r : rows) {
            out += "{\"i\":" + std::to_string(r.i) + ",\"j\":" + std::to_string(r.j) +
                   ",\"k\":" + std::to_string(r.k) + ",\"t1_value\":" + format_double(r.t1_value) +
                   ",\"t2_value\":" + format_double(r.t2_value) +
                   ",\"i_value\":" + format_double(r.i_value) +
                   ",\"value\":" + format_double(r.value) + "}\n";
        }
    }
    return out;
}

// ============================================================================
// Scenario realization: scales, grids, kernels
// ============================================================================

struct BuiltScales {
    TimeScale t1;
    TimeScale t2;
    std::optional<TimeScale> iscale;
};

/// Refined grids are tabulated densely; keep refinement studies from
/// silently requesting gigabyte-scale grids.
constexpr std::size_t kMaxLimitNodes = 2'000'000;

BuiltScales build_scales(const Scenario& sc, std::size_t refine_factor) {
    BuiltScales out{make_scale(sc.t1).refine(refine_factor),
                    make_scale(sc.t2).refine(refine_factor), std::nullopt};
    if (sc.iscale) {
        out.iscale = make_scale(*sc.iscale).refine(refine_factor);
    }
    const std::size_t nodes =
        out.t1.size() * out.t2.size() * (out.iscale ? out.iscale->size() : 1);
    if (refine_factor > 1 && nodes > kMaxLimitNodes) {
        throw Error(Errc::bad_parameter,
                    "refinement factor " + std::to_string(refine_factor) + " produces " +
                        std::to_string(nodes) + " grid nodes (limit " +
                        std::to_string(kMaxLimitNodes) + ")");
    }
    return out;
}

const FunctionDef& find_function(const Scenario& sc, const std::string& name) {
    auto it = sc.functions.find(name);
    if (it == sc.functions.end()) {
        throw Error(Errc::missing_function, "scenario does not define function '" + name + "'");
    }
    return it->second;
}

GridFunction2 build_grid2(const Scenario& sc, const std::string& name, const TimeScale& t1,
                          const TimeScale& t2, bool refined) {
    const FunctionDef& fd = find_function(sc, name);
    if (fd.is_expression()) {
        return GridFunction2::tabulate(t1, t2, *fd.expr);
    }
    if (refined) {
        throw Error(Errc::bad_parameter, "function '" + name +
                                             "' is a table; refinement studies need expressions");
    }
    return GridFunction2(t1, t2, fd.table);
}

GridFunction3 build_grid3(const Scenario& sc, const std::string& name, const Domain3& domain,
                          bool refined) {
    const FunctionDef& fd = find_function(sc, name);
    if (fd.is_expression()) {
        return GridFunction3::tabulate(domain, *fd.expr);
    }
    if (refined) {
        throw Error(Errc::bad_parameter, "function '" + name +
                                             "' is a table; refinement studies need expressions");
    }
    return GridFunction3(domain, fd.table);
}

/// Builds (and caches) the named 3-D grids a scenario kernel references.
class GridCache {
public:
    GridCache(const Scenario& sc, const Domain3& domain, bool refined)
        : sc_(sc), domain_(domain), refined_(refined) {}

    const GridFunction3& get(const std::string& name) {
        auto it = cache_.find(name);
        if (it == cache_.end()) {
            it = cache_.emplace(name, build_grid3(sc_, name, domain_, refined_)).first;
        }
        return it->second;
    }

private:
    const Scenario& sc_;
    const Domain3& domain_;
    bool refined_;
    std::map<std::string, GridFunction3> cache_;
};

KernelSpec build_kernel(const KernelDef& def, const Domain3& domain, GridCache& grids) {
    switch (def.family) {
        case KernelFamily::separable_linear:
            return KernelSpec::separable_linear(grids.get(def.r_name), grids.get(def.f_name));
        case KernelFamily::separable_affine:
            return KernelSpec::separable_affine(grids.get(def.r_name), grids.get(def.f_name),
                                                grids.get(def.w_name));
        case KernelFamily::tabulated_linear:
            return KernelSpec::tabulated_linear(domain, def.table);
    }
    throw Error(Errc::parse_error, "unreachable kernel family");
}

/// subject + bound grids for one realized scenario instance.
struct Instance {
    std::optional<GridFunction2> subject2;
    std::optional<GridFunction2> bound2;
    std::optional<GridFunction3> subject3;
    std::optional<GridFunction3> bound3;
    std::vector<HypothesisIssue> issues;

    [[nodiscard]] bool is_3d() const noexcept { return subject3.has_value(); }
};

void enforce_hypotheses(const std::vector<HypothesisIssue>& issues, bool allow_violation) {
    if (!issues.empty() && !allow_violation) {
        throw Error(issues.front().code, issues.front().detail + " (hypothesis check is strict"
                                                                 " by default; pass"
                                                                 " --allow-hypothesis-violation"
                                                                 " to compute anyway)");
    }
}

Instance compute_instance(const Scenario& sc, const RunOptions& opts, std::size_t refine_factor) {
    const bool refined = refine_factor > 1;
    const BuiltScales scales = build_scales(sc, refine_factor);
    const BoundOptions unchecked{.check_hypotheses = false};
    Instance out;

    if (sc.theorem == TheoremId::lemma) {
        GridFunction2 a = build_grid2(sc, "a", scales.t1, scales.t2, refined);
        GridFunction2 f = build_grid2(sc, "f", scales.t1, scales.t2, refined);
        out.issues = lemma_hypothesis_issues(a, f);
        enforce_hypotheses(out.issues, opts.allow_hypothesis_violation);
        out.bound2 = lemma_bound(a, f, unchecked);
        out.subject2 = solve_volterra_2d(a, f);
        return out;
    }

    const Domain3 domain{scales.t1, scales.t2, *scales.iscale};
    GridCache grids(sc, domain, refined);
    const KernelSpec kernel_f = build_kernel(*sc.kernel, domain, grids);

    switch (sc.theorem) {
        case TheoremId::thm21: {
            const GridFunction3& p1 = grids.get("p1");
            const GridFunction3& p2 = grids.get("p2");
            const GridFunction3& f = grids.get("f");
            out.issues = thm21_hypothesis_issues(p1, p2, f);
            enforce_hypotheses(out.issues, opts.allow_hypothesis_violation);
            out.bound3 = thm21_bound(p1, p2, f, unchecked);
            out.subject3 = solve_volterra_3d(p1, kernel_f);
            return out;
        }
        case TheoremId::thm31: {
            const GridFunction3& g = grids.get("g");
            const GridFunction3& r = grids.get("r");
            const GridFunction3& f = grids.get("f");
            out.issues = thm31_hypothesis_issues(r, f);
            enforce_hypotheses(out.issues, opts.allow_hypothesis_violation);
            out.bound3 = thm31_estimate(g, r, f, unchecked);
            out.subject3 = pointwise_abs(solve_volterra_3d(g, kernel_f));
            return out;
        }
        case TheoremId::thm32: {
            const GridFunction3& g = grids.get("g");
            const GridFunction3& r = grids.get("r");
            const GridFunction3& f = grids.get("f");
            const GridFunction3 k = residual_k(g, kernel_f);
            out.issues = thm32_hypothesis_issues(r, f, k);
            enforce_hypotheses(out.issues, opts.allow_hypothesis_violation);
            out.bound3 = thm32_estimate(g, r, f, k, unchecked);
            out.subject3 = pointwise_abs_diff(solve_volterra_3d(g, kernel_f), g);
            return out;
        }
        case TheoremId::thm33: {
            const GridFunction3& g = grids.get("g");
            const GridFunction3& v = grids.get("v");
            const GridFunction3& r = grids.get("r");
            const GridFunction3& f = grids.get("f");
            const KernelSpec kernel_g =
                sc.kernel_g ? build_kernel(*sc.kernel_g, domain, grids) : kernel_f;
            const GridFunction3 u = solve_volterra_3d(g, kernel_f);
            const GridFunction3 h = solve_volterra_3d(v, kernel_g);
            const GridFunction3 gbar = pointwise_abs_diff(g, v);
            const GridFunction3 kbar = residual_kbar(h, kernel_f, kernel_g);
            out.issues = thm33_hypothesis_issues(gbar, kbar, r, f);
            enforce_hypotheses(out.issues, opts.allow_hypothesis_violation);
            out.bound3 = thm33_estimate(gbar, kbar, r, f, unchecked);
            out.subject3 = pointwise_abs_diff(u, h);
            return out;
        }
        case TheoremId::lemma: break;  // handled above
    }
    throw Error(Errc::parse_error, "unreachable theorem id");
}

} // namespace

// ============================================================================
// verify
// ============================================================================

VerifyOutcome run_verify(const Scenario& sc, const RunOptions& opts) {
    Instance inst = compute_instance(sc, opts, 1);
    const double tol = opts.tol.value_or(sc.tolerance);

    if (opts.corrupt_bound) {
        // Test hook: push one bound value below its subject.
        if (inst.is_3d()) {
            auto& b = *inst.bound3;
            const std::size_t i = b.n1() - 1, j = b.n2() - 1, k = b.n3() - 1;
            b.at(i, j, k) = inst.subject3->at(i, j, k) - 1.0;
        } else {
            auto& b = *inst.bound2;
            const std::size_t i = b.n1() - 1, j = b.n2() - 1;
            b.at(i, j) = inst.subject2->at(i, j) - 1.0;
        }
    }

    VerifyOutcome out;
    out.hypothesis_issues = inst.issues;
    out.report = inst.is_3d() ? check_dominance(*inst.subject3, *inst.bound3, tol,
                                                ToleranceKind::relative)
                              : check_dominance(*inst.subject2, *inst.bound2, tol,
                                                ToleranceKind::relative);
    out.effective_verdict =
        !inst.issues.empty() ? Verdict::hypothesis_unverified : out.report.verdict;

    out.rendered = opts.format == ReportFormat::csv
                       ? render_report_csv(out.report)
                       : render_report_jsonl(out.report, out.effective_verdict);
    const NodeRecord& worst = out.report.nodes[out.report.argmin_node];
    out.summary = "verdict=" + std::string(verdict_name(out.effective_verdict)) +
                  " nodes=" + std::to_string(out.report.nodes.size()) +
                  " tol=" + format_double(tol) + " min_margin=" +
                  format_double(out.report.min_margin) + " at " + node_triple(worst) +
                  " max_violation=" + format_double(out.report.max_violation);
    return out;
}

// ============================================================================
// solve
// ============================================================================

SolveOutcome run_solve(const Scenario& sc, const RunOptions& opts) {
    // Solving needs no bound hypotheses: the oracle is explicit for any data.
    const BuiltScales scales = build_scales(sc, 1);
    SolveOutcome out;
    if (sc.theorem == TheoremId::lemma) {
        const GridFunction2 a = build_grid2(sc, "a", scales.t1, scales.t2, false);
        const GridFunction2 f = build_grid2(sc, "f", scales.t1, scales.t2, false);
        const GridFunction2 u = solve_volterra_2d(a, f);
        out.rendered = render_solution(solution_rows(u), opts.format);
        out.summary = "solved " + std::to_string(u.n1() * u.n2()) + " nodes on " +
                      std::to_string(u.n1()) + "x" + std::to_string(u.n2()) + " grid";
        return out;
    }
    const Domain3 domain{scales.t1, scales.t2, *scales.iscale};
    GridCache grids(sc, domain, false);
    const KernelSpec kernel = build_kernel(*sc.kernel, domain, grids);
    const std::string z0_name = sc.theorem == TheoremId::thm21 ? "p1" : "g";
    const GridFunction3 u = solve_volterra_3d(grids.get(z0_name), kernel);
    out.rendered = render_solution(solution_rows(u), opts.format);
    out.summary = "solved " + std::to_string(u.domain().node_count()) + " nodes on " +
                  std::to_string(u.n1()) + "x" + std::to_string(u.n2()) + "x" +
                  std::to_string(u.n3()) + " grid";
    return out;
}

// ============================================================================
// fuzz
// ============================================================================

namespace {

FuzzInstance run_fuzz_instance(TheoremId theorem, const FuzzParams& params, double tol,
                               std::size_t index, std::uint64_t master_seed) {
    FuzzInstance rec;
    rec.index = index;
    rec.seed = derive_seed(master_seed, index);
    Rng rng(rec.seed);
    const FuzzCaps caps{params.max_points_xy, params.max_points_i, params.coeff_max};

    if (theorem == TheoremId::lemma) {
        const TimeScale t1 = random_scale(rng, caps.max_points_xy);
        const TimeScale t2 = random_scale(rng, caps.max_points_xy);
        const GridFunction2 a = random_nondecreasing_grid2(rng, t1, t2, caps.coeff_max);
        const GridFunction2 f = random_nonneg_grid2(rng, t1, t2, caps.coeff_max);
        const GridFunction2 u = solve_volterra_2d(a, f);
        const GridFunction2 bound = lemma_bound(a, f);
        const BoundReport report = check_dominance(u, bound, tol, ToleranceKind::relative);
        rec.n1 = t1.size();
        rec.n2 = t2.size();
        rec.verdict = report.verdict;
        rec.min_margin = report.min_margin;
        rec.max_violation = report.max_violation;
        return rec;
    }

    const Domain3 domain = random_domain(rng, caps);
    rec.n1 = domain.n1();
    rec.n2 = domain.n2();
    rec.n3 = domain.n3();

    BoundReport report;
    switch (theorem) {
        case TheoremId::thm21: {
            const GridFunction3 p1 = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 p2 = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 f = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 u = solve_volterra_3d(p1, KernelSpec::separable_linear(p2, f));
            report = check_dominance(u, thm21_bound(p1, p2, f), tol, ToleranceKind::relative);
            break;
        }
        case TheoremId::thm31: {
            const GridFunction3 g = rng.coin() ? random_signed_grid(rng, domain, caps.coeff_max)
                                               : random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 r = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 f = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 u = solve_volterra_3d(g, KernelSpec::separable_linear(r, f));
            report = check_dominance(pointwise_abs(u), thm31_estimate(g, r, f), tol,
                                     ToleranceKind::relative);
            break;
        }
        case TheoremId::thm32: {
            const GridFunction3 g = rng.coin() ? random_signed_grid(rng, domain, caps.coeff_max)
                                               : random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 r = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 f = random_nonneg_grid(rng, domain, caps.coeff_max);
            const KernelSpec kernel = KernelSpec::separable_linear(r, f);
            const GridFunction3 k = residual_k(g, kernel);
            const GridFunction3 u = solve_volterra_3d(g, kernel);
            report = check_dominance(pointwise_abs_diff(u, g), thm32_estimate(g, r, f, k), tol,
                                     ToleranceKind::relative);
            break;
        }
        case TheoremId::thm33: {
            const GridFunction3 g = rng.coin() ? random_signed_grid(rng, domain, caps.coeff_max)
                                               : random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 v = rng.coin() ? random_signed_grid(rng, domain, caps.coeff_max)
                                               : random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 r = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 f = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 rg = random_nonneg_grid(rng, domain, caps.coeff_max);
            const GridFunction3 fg = random_nonneg_grid(rng, domain, caps.coeff_max);
            const KernelSpec kernel_f = KernelSpec::separable_linear(r, f);
            const KernelSpec kernel_g = KernelSpec::separable_linear(rg, fg);
            const GridFunction3 u = solve_volterra_3d(g, kernel_f);
            const GridFunction3 h = solve_volterra_3d(v, kernel_g);
            const GridFunction3 gbar = pointwise_abs_diff(g, v);
            const GridFunction3 kbar = residual_kbar(h, kernel_f, kernel_g);
            report = check_dominance(pointwise_abs_diff(u, h),
                                     thm33_estimate(gbar, kbar, r, f), tol,
                                     ToleranceKind::relative);
            break;
        }
        case TheoremId::lemma: break;  // handled above
    }
    rec.verdict = report.verdict;
    rec.min_margin = report.min_margin;
    rec.max_violation = report.max_violation;
    return rec;
}

} // namespace

FuzzOutcome run_fuzz_suite(TheoremId theorem, const FuzzParams& params, double tol,
                           std::size_t jobs, ReportFormat format) {
    FuzzOutcome out;
    out.master_seed = params.seed;
    out.instances.resize(params.count);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= params.count) break;
            try {
                out.instances[idx] = run_fuzz_instance(theorem, params, tol, idx, params.seed);
            } catch (const Error& e) {
                FuzzInstance& rec = out.instances[idx];
                rec.index = idx;
                rec.seed = derive_seed(params.seed, idx);
                rec.verdict = Verdict::violated;
                rec.error = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            pool.emplace_back(worker);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    double worst_margin = 0.0;
    bool first = true;
    for (const FuzzInstance& rec : out.instances) {
        if (rec.verdict != Verdict::dominated) {
            ++out.violation_count;
        }
        if (first || rec.min_margin < worst_margin) {
            worst_margin = rec.min_margin;
            first = false;
        }
    }

    auto verdict_text = [](const FuzzInstance& rec) {
        return rec.error.empty() ? std::string(verdict_name(rec.verdict)) : std::string("error");
    };
    if (format == ReportFormat::csv) {
        out.rendered = "instance,seed,n1,n2,n3,verdict,min_margin,max_violation\n";
        for (const FuzzInstance& rec : out.instances) {
            out.rendered += std::to_string(rec.index) + ',' + std::to_string(rec.seed) + ',' +
                            std::to_string(rec.n1) + ',' + std::to_string(rec.n2) + ',' +
                            std::to_string(rec.n3) + ',' + verdict_text(rec) + ',' +
                            format_double(rec.min_margin) + ',' +
                            format_double(rec.max_violation) + '\n';
        }
    } else {
        for (const FuzzInstance& rec : out.instances) {
            out.rendered += "{\"instance\":" + std::to_string(rec.index) +
                            ",\"seed\":" + std::to_string(rec.seed) +
                            ",\"n1\":" + std::to_string(rec.n1) +
                            ",\"n2\":" + std::to_string(rec.n2) +
                            ",\"n3\":" + std::to_string(rec.n3) + ",\"verdict\":\"" +
                            verdict_text(rec) +
                            "\",\"min_margin\":" + format_double(rec.min_margin) +
                            ",\"max_violation\":" + format_double(rec.max_violation) + "}\n";
        }
        out.rendered += "{\"instances\":" + std::to_string(out.instances.size()) +
                        ",\"violations\":" + std::to_string(out.violation_count) +
                        ",\"seed\":" + std::to_string(out.master_seed) + "}\n";
    }
    out.summary = "fuzz theorem=" + std::string(theorem_name(theorem)) +
                  " count=" + std::to_string(params.count) +
                  " seed=" + std::to_string(params.seed) +
                  " violations=" + std::to_string(out.violation_count) +
                  " worst_margin=" + format_double(worst_margin);
    return out;
}

FuzzOutcome run_fuzz(const Scenario& sc, const RunOptions& opts) {
    FuzzParams params = sc.fuzz;
    if (opts.seed) {
        params.seed = *opts.seed;
    }
    return run_fuzz_suite(sc.theorem, params, opts.tol.value_or(sc.tolerance), opts.jobs,
                          opts.format);
}

// ============================================================================
// limit
// ============================================================================

LimitOutcome run_limit(const Scenario& sc, const RunOptions& opts) {
    if (opts.refine < 1) {
        throw Error(Errc::bad_parameter, "refine ceiling must be >= 1");
    }
    std::vector<std::size_t> factors;
    for (std::size_t f = 1; f <= opts.refine; f *= 2) {
        factors.push_back(f);
    }
    if (factors.back() != opts.refine) {
        factors.push_back(opts.refine);
    }

    LimitOutcome out;
    for (const std::size_t factor : factors) {
        Instance inst = compute_instance(sc, opts, factor);
        const double tol = opts.tol.value_or(sc.tolerance);
        LimitRow row;
        row.factor = factor;
        if (inst.is_3d()) {
            const BoundReport report =
                check_dominance(*inst.subject3, *inst.bound3, tol, ToleranceKind::relative);
            const GridFunction3& b = *inst.bound3;
            row.n1 = b.n1();
            row.n2 = b.n2();
            row.n3 = b.n3();
            row.subject_corner = inst.subject3->at(b.n1() - 1, b.n2() - 1, 0);
            row.bound_corner = b.at(b.n1() - 1, b.n2() - 1, 0);
            row.min_margin = report.min_margin;
            row.dominated = report.verdict == Verdict::dominated;
        } else {
            const BoundReport report =
                check_dominance(*inst.subject2, *inst.bound2, tol, ToleranceKind::relative);
            const GridFunction2& b = *inst.bound2;
            row.n1 = b.n1();
            row.n2 = b.n2();
            row.subject_corner = inst.subject2->at(b.n1() - 1, b.n2() - 1);
            row.bound_corner = b.at(b.n1() - 1, b.n2() - 1);
            row.min_margin = report.min_margin;
            row.dominated = report.verdict == Verdict::dominated;
        }
        row.margin_corner = row.bound_corner - row.subject_corner;
        out.rows.push_back(row);
    }

    if (opts.format == ReportFormat::csv) {
        out.rendered = "factor,n1,n2,n3,subject_corner,bound_corner,margin_corner,min_margin\n";
        for (const LimitRow& r : out.rows) {
            out.rendered += std::to_string(r.factor) + ',' + std::to_string(r.n1) + ',' +
                            std::to_string(r.n2) + ',' + std::to_string(r.n3) + ',' +
                            format_double(r.subject_corner) + ',' +
                            format_double(r.bound_corner) + ',' +
                            format_double(r.margin_corner) + ',' + format_double(r.min_margin) +
                            '\n';
        }
    } else {
        for (const LimitRow& r : out.rows) {
            out.rendered += "{\"factor\":" + std::to_string(r.factor) +
                            ",\"n1\":" + std::to_string(r.n1) + ",\"n2\":" + std::to_string(r.n2) +
                            ",\"n3\":" + std::to_string(r.n3) +
                            ",\"subject_corner\":" + format_double(r.subject_corner) +
                            ",\"bound_corner\":" + format_double(r.bound_corner) +
                            ",\"margin_corner\":" + format_double(r.margin_corner) +
                            ",\"min_margin\":" + format_double(r.min_margin) + "}\n";
        }
    }
    const LimitRow& last = out.rows.back();
    out.summary = "limit levels=" + std::to_string(out.rows.size()) +
                  " max_factor=" + std::to_string(last.factor) +
                  " corner_margin=" + format_double(last.margin_corner) +
                  " min_margin=" + format_double(last.min_margin);
    return out;
}

} // namespace tsg
